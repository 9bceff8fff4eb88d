import init, { delta_mapping, load_curve, feeder_profile } from "./pkg/mdopf_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const fmt = (x, d = 4) => (Number.isFinite(x) ? x.toFixed(d) : "-");

function bindLabel(id) {
  $(id + "-v").textContent = $(id).value;
}

function axes(ctx, w, h, pad, xr, yr) {
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  for (let k = 0; k <= 4; k++) {
    const y = yr[0] + ((yr[1] - yr[0]) * k) / 4;
    ctx.fillText(y.toFixed(3), 2, sy(y) + 4);
  }
  return { sx, sy };
}

function polyline(ctx, xs, ys, sx, sy, color, dash) {
  ctx.strokeStyle = color;
  ctx.setLineDash(dash ? [6, 4] : []);
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  ctx.setLineDash([]);
}

function updateDelta() {
  bindLabel("d-tb");
  bindLabel("d-tc");
  const sd = new Float64Array(["d-pab", "d-pbc", "d-pca", "d-qab", "d-qbc", "d-qca"].map(num));
  let r;
  try {
    r = delta_mapping(sd, num("d-tb"), num("d-tc"));
  } catch (e) {
    $("d-table").innerHTML = `<tr><td class="err">${e.message ?? e}</td></tr>`;
    return;
  }
  const rows = ["a", "b", "c"].map(
    (p, i) =>
      `<tr><th>${p}</th><td>${fmt(r[i])}</td><td>${fmt(r[i + 3])}</td>` +
      `<td>${fmt(r[i + 6])}</td><td>${fmt(r[i + 9])}</td>` +
      `<td>${fmt(r[i + 6] - r[i])}</td><td>${fmt(r[i + 9] - r[i + 3])}</td></tr>`,
  );
  $("d-table").innerHTML =
    "<tr><th>phase</th><th>P linear</th><th>Q linear</th><th>P exact</th><th>Q exact</th><th>ΔP</th><th>ΔQ</th></tr>" +
    rows.join("") +
    `<tr><th>VUF</th><td colspan="6" style="text-align:left">${fmt(r[12], 3)} %</td></tr>`;
}

function updateLoad() {
  bindLabel("l-alpha");
  bindLabel("l-beta");
  const n = 81;
  const r = load_curve(1.0, 0.5, num("l-alpha"), num("l-beta"), 0.8, 1.2, n);
  const col = (k) => Array.from({ length: n }, (_, i) => r[5 * i + k]);
  const v = col(0);
  const series = [1, 2, 3, 4].map(col);
  const all = series.flat();
  const yr = [Math.min(...all), Math.max(...all)];
  const c = $("l-canvas");
  const ctx = c.getContext("2d");
  const { sx, sy } = axes(ctx, c.width, c.height, 40, [0.8, 1.2], yr);
  polyline(ctx, v, series[0], sx, sy, "#1f77b4", false);
  polyline(ctx, v, series[1], sx, sy, "#d62728", false);
  polyline(ctx, v, series[2], sx, sy, "#1f77b4", true);
  polyline(ctx, v, series[3], sx, sy, "#d62728", true);
  ctx.fillStyle = "#444";
  for (const x of [0.8, 0.9, 1.0, 1.1, 1.2]) ctx.fillText(x.toFixed(1), sx(x) - 8, c.height - 24);
  ctx.fillStyle = "#1f77b4";
  ctx.fillText("p", c.width - 30, 50);
  ctx.fillStyle = "#d62728";
  ctx.fillText("q", c.width - 30, 64);
}

function updateFeeder() {
  ["f-alpha", "f-m", "f-vuf"].forEach(bindLabel);
  const summary = $("f-summary");
  let r;
  try {
    r = JSON.parse(feeder_profile(num("f-alpha"), num("f-m"), num("f-vuf"), Math.max(0, num("f-seed") | 0)));
  } catch (e) {
    summary.innerHTML = `<span class="err">${e.message ?? e}</span>`;
    return;
  }
  const c = $("f-canvas");
  const ctx = c.getContext("2d");
  const vals = r.lp.concat(r.ac ?? []);
  const yr = [Math.min(...vals) - 0.005, Math.max(...vals) + 0.005];
  const n = r.labels.length;
  const { sx, sy } = axes(ctx, c.width, c.height, 48, [-0.5, n - 0.5], yr);
  const bw = (sx(1) - sx(0)) * 0.35;
  r.labels.forEach((label, i) => {
    ctx.fillStyle = "#1f77b4";
    ctx.fillRect(sx(i) - bw, sy(r.lp[i]) - 2, bw, 4);
    if (r.ac) {
      ctx.fillStyle = "#ff7f0e";
      ctx.fillRect(sx(i), sy(r.ac[i]) - 2, bw, 4);
    }
    ctx.save();
    ctx.translate(sx(i) + 3, c.height - 6);
    ctx.rotate(-Math.PI / 3);
    ctx.fillStyle = "#444";
    ctx.fillText(label, 0, 0);
    ctx.restore();
  });
  ctx.fillStyle = "#1f77b4";
  ctx.fillText("linear", c.width - 90, 60);
  ctx.fillStyle = "#ff7f0e";
  ctx.fillText("exact", c.width - 90, 74);
  let text = `linear objective ${fmt(r.obj_lp, 5)}, source VUF ${fmt(r.vuf, 3)} %. `;
  if (r.error) {
    text += `<span class="err">exact model failed: ${r.error}</span>`;
  } else {
    text +=
      `exact objective ${fmt(r.obj_ac, 5)} after ${r.iterations} sweeps. ` +
      `Mean error: |V|² ${fmt(r.dw, 3)} %, P ${fmt(r.dpb, 3)} %, Q ${fmt(r.dqb, 3)} %.`;
  }
  summary.innerHTML = text;
}

await init();
for (const id of ["d-pab", "d-pbc", "d-pca", "d-qab", "d-qbc", "d-qca", "d-tb", "d-tc"]) $(id).addEventListener("input", updateDelta);
for (const id of ["l-alpha", "l-beta"]) $(id).addEventListener("input", updateLoad);
for (const id of ["f-alpha", "f-m", "f-vuf", "f-seed"]) $(id).addEventListener("input", updateFeeder);
updateDelta();
updateLoad();
updateFeeder();
