import init, { evolve, gauge, semigroup } from "./pkg/dnls_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function params() {
  return { n: num("n"), L: num("L"), lambda: num("lambda"), a: num("amp"), w: num("width"), k: num("k") };
}

function plot(canvas, xs, series, colors) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (hi === lo) { hi += 1; lo -= 1; }
  const pad = 0.05 * (hi - lo);
  lo -= pad; hi += pad;
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => ((x - x0) / (x1 - x0)) * (width - 20) + 10;
  const py = (y) => height - 10 - ((y - lo) / (hi - lo)) * (height - 20);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath(); ctx.moveTo(10, py(0)); ctx.lineTo(width - 10, py(0)); ctx.stroke();
  series.forEach((s, i) => {
    ctx.strokeStyle = colors[i];
    ctx.beginPath();
    s.forEach((v, j) => (j ? ctx.lineTo(px(xs[j]), py(v)) : ctx.moveTo(px(xs[j]), py(v))));
    ctx.stroke();
  });
}

function nodes(n, L) {
  return Array.from({ length: n }, (_, j) => -L / 2 + (j * L) / n);
}

function report(id, text, isError) {
  $(id).textContent = text;
  $(id).className = isError ? "out err" : "out";
}

let animation = null;

function runEvolution() {
  const p = params();
  const frames = 60;
  let data;
  try {
    data = evolve(p.n, p.L, p.lambda, p.a, p.w, p.k, num("T"), frames);
  } catch (e) {
    return report("evo-out", String(e), true);
  }
  const xs = nodes(p.n, p.L);
  const masses = data.subarray((frames + 1) * p.n);
  const drift = Math.max(...masses.map((m) => Math.abs(m - masses[0])));
  report("evo-out", `‖u‖ = ${masses[0].toFixed(6)}, max drift ${drift.toExponential(2)}`);
  const first = Array.from(data.subarray(0, p.n));
  cancelAnimationFrame(animation);
  let f = 0;
  const draw = () => {
    const frame = Array.from(data.subarray(f * p.n, (f + 1) * p.n));
    plot($("evo"), xs, [first, frame], ["#bbb", "#1565c0"]);
    f = (f + 1) % (frames + 1);
    animation = requestAnimationFrame(() => setTimeout(draw, 50));
  };
  draw();
}

function runGauge() {
  const p = params();
  let data;
  try {
    data = gauge(p.n, p.L, p.lambda, p.a, p.w, p.k);
  } catch (e) {
    return report("gauge-out", String(e), true);
  }
  const n = p.n;
  const block = (i) => Array.from(data.subarray(i * n, (i + 1) * n));
  plot($("gauge"), nodes(n, p.L), [block(0), block(1), block(2), block(3), block(4)],
    ["#222", "#1565c0", "#64b5f6", "#c62828", "#ef9a9a"]);
  report("gauge-out",
    `|u| black, φ blue, ψ red; constraint residual ${data[5 * n].toExponential(2)}, ` +
    `total phase λ‖u‖² = ${data[5 * n + 1].toFixed(4)}`);
}

function runSemigroup() {
  const p = params();
  let data;
  try {
    data = semigroup(p.n, p.L, num("r"), p.a, p.w, p.k, num("tmax"), 60);
  } catch (e) {
    return report("semi-out", String(e), true);
  }
  const t = [], lhs = [], rhs = [];
  for (let i = 0; i < data.length; i += 3) { t.push(data[i]); lhs.push(data[i + 1]); rhs.push(data[i + 2]); }
  plot($("semi"), t, [lhs, rhs], ["#1565c0", "#c62828"]);
  const worst = Math.max(...lhs.map((v, i) => v / rhs[i]));
  report("semi-out", `‖|x|^r e^{it∂²}f‖ blue, bound red; max ratio ${worst.toFixed(4)}`);
}

await init();
$("run").onclick = runEvolution;
$("gauge-run").onclick = runGauge;
$("semi-run").onclick = runSemigroup;
runEvolution();
runGauge();
runSemigroup();
