import init, { singleSeries, pairSeries, boundPairSeries } from "./pkg/toa_web.js";

const COLORS = ["#1f5fbf", "#c0392b", "#27865a", "#8e44ad"];
const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

const modes = {
  single: {
    columns: ["Π", "from the left", "from the right", "flux"],
    run() {
      const x0 = num("s-x0"), p0 = num("s-p0"), X = num("s-X");
      // Window around the classical arrival, widened for slow packets.
      const v = Math.max(Math.abs(p0), 0.5);
      const tc = Math.abs(X - x0) / v;
      return singleSeries(x0, p0, num("s-dx"), X, 0, Math.min(3 * tc + 4, 60), 400);
    },
  },
  pair: {
    columns: ["boson", "fermion", "distinguishable"],
    run() {
      const p0 = num("p-p0");
      return pairSeries(num("p-xa"), p0, num("p-dx"), (3 - num("p-xa")) / p0 * 2 + 2, 400);
    },
  },
  bound: {
    get columns() {
      const level = parseInt($("b-state").value, 10);
      return level < 0 ? ["boson", "fermion"] : [`level ${level}`];
    },
    run() {
      const p0 = num("b-p0");
      return boundPairSeries(parseInt($("b-state").value, 10), num("b-omega"), p0, num("b-dx"), -40 / p0, 100 / p0, 300);
    },
  },
};

let mode = "single";

function draw(rows, columns) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const width = columns.length + 1;
  const n = rows.length / width;
  const pad = { l: 60, r: 20, t: 20, b: 40 };
  const W = canvas.width - pad.l - pad.r, H = canvas.height - pad.t - pad.b;
  let ymin = 0, ymax = 0;
  for (let i = 0; i < rows.length; i++) {
    if (i % width === 0) continue;
    ymin = Math.min(ymin, rows[i]);
    ymax = Math.max(ymax, rows[i]);
  }
  ymax = ymax > ymin ? ymax * 1.05 : 1;
  const t0 = rows[0], t1 = rows[(n - 1) * width];
  const sx = (t) => pad.l + ((t - t0) / (t1 - t0)) * W;
  const sy = (y) => pad.t + H - ((y - ymin) / (ymax - ymin)) * H;

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#333";
  ctx.font = "16px system-ui";
  ctx.strokeRect(pad.l, pad.t, W, H);
  for (let k = 0; k <= 5; k++) {
    const t = t0 + ((t1 - t0) * k) / 5;
    ctx.fillText(t.toFixed(1), sx(t) - 12, canvas.height - 15);
    const y = ymin + ((ymax - ymin) * k) / 5;
    ctx.fillText(y.toFixed(2), 8, sy(y) + 5);
  }
  ctx.fillText("t", pad.l + W / 2, canvas.height - 2);
  if (ymin < 0) {
    ctx.beginPath();
    ctx.moveTo(pad.l, sy(0));
    ctx.lineTo(pad.l + W, sy(0));
    ctx.stroke();
  }
  columns.forEach((name, c) => {
    ctx.strokeStyle = COLORS[c % COLORS.length];
    ctx.lineWidth = 2;
    ctx.setLineDash(mode === "single" && c === 3 ? [6, 4] : []);
    ctx.beginPath();
    for (let k = 0; k < n; k++) {
      const x = sx(rows[k * width]), y = sy(rows[k * width + c + 1]);
      k ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    }
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(name, pad.l + W - 170, pad.t + 22 * (c + 1));
  });
  ctx.setLineDash([]);
}

function integrals(rows, width) {
  const sums = new Array(width - 1).fill(0);
  for (let k = width; k < rows.length; k += width) {
    const dt = rows[k] - rows[k - width];
    for (let c = 1; c < width; c++) sums[c - 1] += 0.5 * dt * (rows[k + c] + rows[k - width + c]);
  }
  return sums;
}

function update() {
  const m = modes[mode];
  const started = performance.now();
  try {
    const rows = m.run();
    const columns = m.columns;
    draw(rows, columns);
    const ints = integrals(rows, columns.length + 1)
      .map((v, c) => `${columns[c]} ${v.toFixed(4)}`)
      .join(", ");
    $("status").textContent = `time integrals: ${ints} (${(performance.now() - started).toFixed(0)} ms)`;
  } catch (e) {
    $("status").textContent = `error: ${e.message ?? e}`;
  }
}

function showValue(input) {
  const out = input.nextElementSibling;
  if (out && out.tagName === "OUTPUT") out.textContent = input.value;
}

let pending = 0;
function schedule() {
  cancelAnimationFrame(pending);
  $("status").textContent = "computing…";
  pending = requestAnimationFrame(() => setTimeout(update, 0));
}

await init();
for (const input of document.querySelectorAll("input, select")) {
  showValue(input);
  const lazy = input.id.startsWith("b-");
  input.addEventListener("input", () => {
    showValue(input);
    if (!lazy) schedule();
  });
  input.addEventListener("change", () => lazy && schedule());
}
for (const button of document.querySelectorAll("nav button")) {
  button.addEventListener("click", () => {
    mode = button.dataset.mode;
    document.querySelectorAll("nav button").forEach((b) => b.classList.toggle("active", b === button));
    document.querySelectorAll("fieldset").forEach((f) => f.classList.toggle("active", f.id === mode));
    schedule();
  });
}
schedule();
