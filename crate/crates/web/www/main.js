import init, { light_cone, magnetization, feasibility } from "./pkg/effvol_web.js";

const $ = (id) => document.getElementById(id);

function report(el, err) {
  el.textContent = err ? String(err.message ?? err) : "";
  el.className = err ? "err" : "";
}

let cone = null;

function drawCone() {
  if (!cone) return;
  const canvas = $("lc-canvas");
  const ctx = canvas.getContext("2d");
  const { nodes, edges } = cone.device;
  const xs = nodes.map((n) => n.x), ys = nodes.map((n) => n.y);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const pad = 20;
  const sx = (canvas.width - 2 * pad) / Math.max(x1 - x0, 1);
  const sy = (canvas.height - 2 * pad) / Math.max(y1 - y0, 1);
  const pos = new Map(nodes.map((n) => [n.label, [pad + (n.x - x0) * sx, canvas.height - pad - (n.y - y0) * sy]]));
  const k = Number($("lc-slider").value);
  const frontier = new Set(cone.frontiers[Math.min(k, cone.frontiers.length - 1)]);

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#bbb";
  for (const [a, b] of edges) {
    const [pa, pb] = [pos.get(a), pos.get(b)];
    ctx.beginPath(); ctx.moveTo(...pa); ctx.lineTo(...pb); ctx.stroke();
  }
  for (const n of nodes) {
    const [x, y] = pos.get(n.label);
    ctx.fillStyle = frontier.has(n.label) ? "#d2442a" : "#ccc";
    ctx.beginPath(); ctx.arc(x, y, 5, 0, 2 * Math.PI); ctx.fill();
  }
  $("lc-info").textContent =
    `${frontier.size} of ${nodes.length} qubits; cone holds ${cone.cone_two_qubit_gates} of ${cone.circuit_two_qubit_gates} two-qubit gates`;
}

function runCone() {
  try {
    cone = JSON.parse(light_cone($("lc-device").value, Number($("lc-steps").value), $("lc-obs").value));
    $("lc-slider").max = cone.frontiers.length - 1;
    $("lc-slider").value = cone.frontiers.length - 1;
    report($("lc-info"));
    drawCone();
  } catch (e) {
    report($("lc-info"), e);
  }
}

function runMagnetization() {
  const info = $("mz-info");
  try {
    const t0 = performance.now();
    const out = JSON.parse(magnetization($("mz-device").value, Number($("mz-steps").value), $("mz-obs").value, Number($("mz-points").value)));
    report(info);
    info.textContent = `${out.cone_qubits} light-cone qubits, ${(performance.now() - t0).toFixed(0)} ms`;
    plot($("mz-canvas"), out.points);
  } catch (e) {
    report(info, e);
  }
}

function plot(canvas, points) {
  const ctx = canvas.getContext("2d");
  const pad = 36;
  const X = (t) => pad + (t / (Math.PI / 2)) * (canvas.width - 2 * pad);
  const Y = (v) => canvas.height / 2 - v * (canvas.height / 2 - pad / 2);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.beginPath(); ctx.moveTo(X(0), Y(0)); ctx.lineTo(X(Math.PI / 2), Y(0)); ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("1", 8, Y(1) + 4); ctx.fillText("0", 8, Y(0) + 4); ctx.fillText("-1", 4, Y(-1) + 4);
  ctx.fillText("0", X(0) - 3, canvas.height - 4); ctx.fillText("π/2", X(Math.PI / 2) - 8, canvas.height - 4);
  ctx.strokeStyle = "#2a6fd2";
  ctx.beginPath();
  points.forEach((p, i) => (i ? ctx.lineTo(X(p.theta), Y(p.value)) : ctx.moveTo(X(p.theta), Y(p.value))));
  ctx.stroke();
}

function runFeasibility() {
  const out = $("fe-out");
  try {
    const r = JSON.parse(feasibility(Number($("fe-eps").value), Number($("fe-v").value), Number($("fe-vb").value), Number($("fe-delta").value), $("fe-chain").checked));
    const t = r.t_delta;
    const rows = [
      ["F_eff = exp(-ε V_eff)", `${r.f_eff.toExponential(3)} (10^${r.log10_f_eff.toFixed(2)})`],
      ["t_δ (steps)", t.t_delta.toFixed(4)],
      ["regime", t.branch],
      ["zero-error limit", t.zero_error_limit.toFixed(4)],
      ["large-error limit", t.large_error_limit === null ? "n/a" : t.large_error_limit.toFixed(4)],
    ];
    out.innerHTML = rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`).join("");
  } catch (e) {
    out.innerHTML = `<tr><td class="err">${e.message ?? e}</td></tr>`;
  }
}

await init();
$("lc-run").onclick = runCone;
$("lc-slider").oninput = drawCone;
$("mz-run").onclick = runMagnetization;
for (const id of ["fe-eps", "fe-v", "fe-vb", "fe-delta", "fe-chain"]) $(id).oninput = runFeasibility;
runCone();
runFeasibility();
