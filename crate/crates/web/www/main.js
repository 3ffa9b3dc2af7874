import init, { bound_curves, tightness_demo, debate_demo } from "./pkg/subsup_web.js";

const COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#222"];

// series: [{ name, points: [[x, y], ...], dashed?, dots? }]
function plot(canvas, series, { xLabel, yLabel, yMax }) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 60, r: 150, t: 10, b: 35 };
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const x1 = Math.max(...xs) || 1;
  const y1 = yMax ?? (Math.max(...ys) || 1);
  const px = (x) => pad.l + (x / x1) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - (Math.min(y, y1) / y1) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = (y1 * i) / 4;
    ctx.fillText(y.toPrecision(3), 5, py(y) + 4);
    const x = (x1 * i) / 4;
    ctx.fillText(x.toPrecision(3), px(x) - 12, h - pad.b + 15);
  }
  ctx.fillText(xLabel, w / 2 - 40, h - 5);
  ctx.fillText(yLabel, 5, pad.t + 10);

  series.forEach((s, i) => {
    ctx.strokeStyle = ctx.fillStyle = s.color ?? COLORS[i % COLORS.length];
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    s.points.forEach(([x, y], j) => (j ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
    if (!s.dots) ctx.stroke();
    if (s.dots) s.points.forEach(([x, y]) => ctx.fillRect(px(x) - 3, py(y) - 3, 6, 6));
    ctx.setLineDash([]);
    ctx.fillText(s.name, w - pad.r + 10, pad.t + 15 + 16 * i);
  });
}

function guarded(out, fn) {
  try {
    out.classList.remove("err");
    fn();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

const $ = (id) => document.getElementById(id);

function drawBounds() {
  const c = +$("b-c").value;
  const beta = +$("b-beta").value;
  $("b-c-v").textContent = c.toFixed(2);
  $("b-beta-v").textContent = beta.toFixed(2);
  const b = JSON.parse(bound_curves(c, beta, 100));
  const zip = (ys) => b.gamma.map((g, i) => [g, ys[i]]);
  plot($("bounds"), [
    { name: "1 - e^-(1-γ)", points: zip(b.main) },
    { name: `β = ${beta}`, points: zip(b.beta) },
    { name: `with c = ${c}`, points: zip(b.curv_f) },
  ], { xLabel: "γ", yLabel: "ratio", yMax: 1 });
}

function runTightness() {
  const out = $("t-out");
  guarded(out, () => {
    const t = JSON.parse(tightness_demo(+$("t-k").value, +$("t-gamma").value));
    out.textContent =
      `k' = ${t.k_prime}, ε = ${t.epsilon.toFixed(6)}\n` +
      `realized ${t.realized.toFixed(9)}   closed form ${t.closed_form.toFixed(9)}   asymptote ${t.asymptote.toFixed(9)}`;
    const series = [{ name: "greedy prefix", points: t.path }];
    if (t.overflow) series.push({ name: "next pick (u)", points: [t.overflow], dots: true });
    series.push({ name: "asymptote", points: [[0, t.asymptote], [t.path.at(-1)[0], t.asymptote]], dashed: true });
    plot($("tight"), series, { xLabel: "g / θ", yLabel: "f / f(O)", yMax: 1 });
  });
}

function runDebate() {
  const out = $("d-out");
  out.textContent = "simulating...";
  setTimeout(() => guarded(out, () => {
    const local = $("d-view").value === "local";
    const d = JSON.parse(debate_demo(+$("d-m").value, +$("d-t").value, +$("d-r").value, local, BigInt($("d-seed").value)));
    const cap = d.budget_cap;
    const clip = (pts) => pts.filter((p) => p[0] <= cap);
    const series = d.curves.map((c) => ({ name: c.name, points: clip(c.points) }));
    if (d.frontier) series.push({ name: "optimum", points: d.frontier, dashed: true, color: "#222" });
    out.textContent = `θ = ${d.theta.toFixed(1)} tokens, curves shown up to ${cap.toFixed(1)}` +
      (d.frontier ? "" : " (too many agents for the exact optimum)");
    plot($("debate"), series, { xLabel: "token cost", yLabel: "expected correct" });
  }), 0);
}

await init();
$("b-c").addEventListener("input", drawBounds);
$("b-beta").addEventListener("input", drawBounds);
$("t-run").addEventListener("click", runTightness);
$("d-run").addEventListener("click", runDebate);
drawBounds();
runTightness();
runDebate();
