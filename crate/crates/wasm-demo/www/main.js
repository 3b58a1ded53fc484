import init, { bounds, line_run, static_compare } from "./pkg/aqt_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(out, e) {
  out.className = "out err";
  out.textContent = String(e.message ?? e);
}

// series: [{ values, color, label }]; non-finite values are skipped
function plot(canvas, series, { hline } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => s.values).filter(Number.isFinite);
  if (hline !== undefined && Number.isFinite(hline)) finite.push(hline);
  if (finite.length === 0) return;
  const top = Math.max(...finite, 1) * 1.05;
  const n = Math.max(...series.map((s) => s.values.length));
  const x = (i) => pad + (i / Math.max(n - 1, 1)) * (w - 2 * pad);
  const y = (v) => h - pad - (v / top) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(top.toPrecision(3), 2, pad / 2 + 8);
  ctx.fillText("0", pad - 10, h - pad + 4);
  ctx.fillText(String(n), w - pad, h - pad + 14);

  if (hline !== undefined && Number.isFinite(hline)) {
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#c33";
    ctx.beginPath();
    ctx.moveTo(pad, y(hline));
    ctx.lineTo(w - pad / 2, y(hline));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    let pen = false;
    s.values.forEach((v, i) => {
      if (!Number.isFinite(v)) { pen = false; return; }
      pen ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v));
      pen = true;
    });
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - 200, 14 + 14 * k);
  });
}

function runBounds() {
  const out = $("b-out");
  try {
    const r = JSON.parse(bounds($("b-formula").value, num("b-r"), num("b-b"), num("b-d"),
      num("b-c1"), num("b-c2"), num("b-c3"), num("b-i"), num("b-base")));
    const values = r.values.map((v) => (v === null ? Infinity : v));
    const limit = r.limit === "inf" || r.limit === null ? undefined : Number(r.limit);
    plot($("b-plot"), [{ values, color: "#1565c0", label: $("b-formula").value }], { hline: limit });
    out.className = "out";
    const g = r.growth ? `${r.growth.label} (heuristic, mean ratio ${r.growth.ratio.toFixed(4)})` : "n/a";
    out.textContent = `limit: ${r.limit ?? "n/a"}   growth: ${g}\n` +
      values.slice(0, 8).map((v, i) => `i=${i + 1}: ${v}`).join("   ");
  } catch (e) {
    fail(out, e);
  }
}

function runLine() {
  const out = $("l-out");
  try {
    const r = JSON.parse(line_run(num("l-d"), $("l-r").value, num("l-b"), $("l-disc").value, num("l-steps")));
    plot($("l-plot"), [
      { values: r.interval.in_system, color: "#1565c0", label: "interval-strategy in system" },
      { values: r.plain.in_system, color: "#2e7d32", label: "plain discipline in system" },
    ]);
    out.className = "out";
    const fmt = (s) => `max queue ${s.max_queue_len}, max system time ${s.max_system_time ?? "n/a"}`;
    out.textContent =
      `interval: ${fmt(r.interval)} (delivery bound ${r.delivery_bound})\n` +
      `plain:    ${fmt(r.plain)}\n` +
      `phase durations: ${r.phase_durations.slice(0, 15).join(", ")}\n` +
      `line bound:      ${r.phase_bounds.slice(0, 15).map((b) => b.toFixed(2)).join(", ")}`;
  } catch (e) {
    fail(out, e);
  }
}

function runStatic() {
  const out = $("s-out");
  try {
    const r = JSON.parse(static_compare(num("s-m"), $("s-paths").value));
    const rows = r.greedy.map((g) => `<tr><td>${g.discipline}</td><td>${g.makespan}</td></tr>`).join("");
    out.className = "out";
    out.innerHTML =
      `n = ${r.n}, d = ${r.d}, n+d = ${r.n + r.d}, n*d = ${r.n * r.d}, optimal makespan = ${r.optimal}` +
      `<table><tr><th>discipline</th><th>greedy makespan</th></tr>${rows}</table>`;
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("b-go").onclick = runBounds;
$("l-go").onclick = runLine;
$("s-go").onclick = runStatic;
runBounds();
runLine();
runStatic();
