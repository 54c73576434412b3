// Built by `wasm-bindgen --target web --out-dir www/pkg`; see the README.
import init, { transfer_grid, grid_side, noise_curve, entropy_envelope, TrainingDemo } from "./pkg/latentswap_web.js";

const $ = (id) => document.getElementById(id);

function drawGrid() {
  const seed = Number($("grid-seed").value) >>> 0;
  const n = Number($("grid-n").value);
  const side = grid_side(n);
  const px = transfer_grid(seed, n);
  const c = $("grid");
  const scale = Math.max(1, Math.floor(480 / side));
  c.width = side * scale;
  c.height = side * scale;
  const off = new OffscreenCanvas(side, side);
  off.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(px), side, side), 0, 0);
  const ctx = c.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, c.width, c.height);
}

// Polylines on a shared axis; `series` are arrays of [x, y].
function plot(canvas, series, styles, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pts = series.flat();
  if (pts.length === 0) return;
  const fy = logY ? (y) => Math.log10(Math.max(y, 1e-6)) : (y) => y;
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => fy(p[1]));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => 30 + ((x - x0) / (x1 - x0 || 1)) * (w - 40);
  const sy = (y) => h - 20 - ((fy(y) - y0) / (y1 - y0 || 1)) * (h - 30);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#666";
  ctx.fillText(logY ? `1e${y1.toFixed(1)}` : y1.toFixed(2), 2, 12);
  ctx.fillText(logY ? `1e${y0.toFixed(1)}` : y0.toFixed(2), 2, h - 22);
  ctx.fillText(x0.toPrecision(2), 30, h - 5);
  ctx.fillText(x1.toPrecision(3), w - 40, h - 5);
  series.forEach((s, i) => {
    ctx.strokeStyle = styles[i].color;
    ctx.setLineDash(styles[i].dash || []);
    ctx.beginPath();
    s.forEach(([x, y], k) => (k ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  });
  ctx.setLineDash([]);
}

function rows(flat, k) {
  const out = [];
  for (let i = 0; i < flat.length; i += k) out.push(Array.from(flat.slice(i, i + k)));
  return out;
}

function drawCurves() {
  const alphas = Array.from({ length: 200 }, (_, i) => 0.02 + (i * 4) / 200);
  const q = rows(noise_curve(new Float64Array(alphas)), 2);
  plot($("q"), [q], [{ color: "#1f77b4" }], { logY: true });
  const e = rows(entropy_envelope(200), 3);
  plot($("h"), [e.map((r) => [r[0], r[1]]), e.map((r) => [r[0], r[2]])], [
    { color: "#1f77b4" },
    { color: "#d62728", dash: [4, 3] },
  ]);
}

let demo = null;
let running = false;
const history = [[], [], []];

function frame() {
  if (!running) return;
  const [step, la, lb, ld] = demo.step(10);
  history[0].push([step, la]);
  history[1].push([step, lb]);
  history[2].push([step, ld]);
  if (step % 200 === 0) {
    const [risk, tc] = demo.score();
    $("train-status").textContent =
      `step ${step}  L_A ${la.toFixed(4)}  L_B ${lb.toFixed(4)}  L_D ${ld.toFixed(4)}\n` +
      `guided risk ${risk.toFixed(4)}  code dependence ${tc.toFixed(4)} nats`;
  }
  plot($("losses"), history, [{ color: "#1f77b4" }, { color: "#ff7f0e" }, { color: "#999" }], { logY: true });
  requestAnimationFrame(frame);
}

await init();
$("grid-go").onclick = drawGrid;
$("grid-n").oninput = drawGrid;
$("train-go").onclick = () => {
  demo?.free();
  demo = new TrainingDemo(Number($("train-seed").value) >>> 0, Number($("train-lambda").value));
  history.forEach((h) => (h.length = 0));
  running = true;
  requestAnimationFrame(frame);
};
$("train-stop").onclick = () => (running = false);
drawGrid();
drawCurves();
