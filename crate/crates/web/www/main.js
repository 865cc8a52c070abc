import init, { comparePaths, costCurve, checkSolver } from "./pkg/vaxcontract_web.js";

const COLORS = ["#1f77b4", "#ff7f0e", "#111"];
const $ = (id) => document.getElementById(id);

function plot(canvas, xs, series, dots = []) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 60;
  ctx.clearRect(0, 0, width, height);

  const all = series.flat().concat(dots.flatMap((d) => d.ys)).filter(Number.isFinite);
  const yMin = Math.min(0, ...all);
  const yMax = Math.max(...all) * 1.05 || 1;
  const xMin = xs[0];
  const xMax = xs[xs.length - 1];
  const px = (x) => pad + ((x - xMin) / (xMax - xMin)) * (width - 2 * pad);
  const py = (y) => height - pad - ((y - yMin) / (yMax - yMin)) * (height - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, height - pad);
  ctx.lineTo(width - pad, height - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "24px sans-serif";
  ctx.fillText(yMax.toPrecision(3), 4, pad);
  ctx.fillText(xMax.toPrecision(3), width - pad - 40, height - pad + 34);

  series.forEach((ys, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 4;
    ctx.beginPath();
    ys.forEach((y, j) => (j ? ctx.lineTo(px(xs[j]), py(y)) : ctx.moveTo(px(xs[j]), py(y))));
    ctx.stroke();
  });

  for (const { xs: dx, ys, color } of dots) {
    ctx.fillStyle = color;
    ys.forEach((y, j) => {
      ctx.beginPath();
      ctx.arc(px(dx[j]), py(y), 6, 0, 2 * Math.PI);
      ctx.fill();
    });
  }
  return { px, py };
}

function report(id, fn) {
  const el = $(id);
  try {
    el.classList.remove("error");
    el.textContent = fn();
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e.message ?? e);
  }
}

function params() {
  const v = {};
  for (const id of ["z", "t", "a", "k"]) {
    v[id] = Number($(id).value);
    $(id).nextElementSibling.textContent = $(id).value;
  }
  return v;
}

function update() {
  const { z, t, a, k } = params();

  report("paths-stats", () => {
    const p = comparePaths(z, t, a, k, 200);
    plot($("paths"), p.times, [p.constant, p.declining]);
    const [ac, ad] = p.adjustmentCost;
    const [dc, dd] = p.meanDelay;
    return `adjustment cost  constant ${ac.toFixed(4)}  declining ${ad.toFixed(4)}\n` +
           `mean delay       constant ${dc.toFixed(4)}  declining ${dd.toFixed(4)}`;
  });

  report("curve-stats", () => {
    const c = costCurve(z, a, k, 0, 300);
    const { px, py } = plot($("curve"), c.horizons, [c.adjustment, c.opportunity, c.total]);
    const ctx = $("curve").getContext("2d");
    ctx.fillStyle = "#d62728";
    ctx.beginPath();
    ctx.arc(px(c.optimalHorizon), py(c.optimalCost), 9, 0, 2 * Math.PI);
    ctx.fill();
    return `optimal horizon ${c.optimalHorizon.toFixed(5)}  social cost ${c.optimalCost.toFixed(5)}`;
  });

  report("solver-stats", () => {
    const n = Math.max(2, Math.min(5000, Number($("n").value) | 0));
    const s = checkSolver(z, t, a, k, n);
    plot($("solver"), s.times, [s.analytic], [{ xs: s.times, ys: s.numeric, color: COLORS[1] }]);
    return `max |z_numeric - z_exact| ${s.maxError.toExponential(3)}  residual ${s.residual.toExponential(3)}`;
  });
}

await init();
for (const id of ["z", "t", "a", "k", "n"]) $(id).addEventListener("input", update);
update();
