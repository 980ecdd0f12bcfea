import init, { similarityMatrix, toyCompletion, trainingCurves } from "./pkg/cmf_demo.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => (x === null || x === undefined ? "" : Number(x).toFixed(3));

function call(fn, ...args) {
  const out = JSON.parse(fn(...args));
  if (out.error) throw new Error(out.error);
  return out;
}

function table(head, rows) {
  const t = document.createElement("table");
  const tr = t.insertRow();
  for (const h of head) {
    const th = document.createElement("th");
    th.textContent = h;
    tr.appendChild(th);
  }
  for (const row of rows) {
    const r = t.insertRow();
    row.forEach((cell, i) => {
      const td = r.insertCell();
      td.textContent = cell;
      if (i === 0) td.className = "label";
    });
  }
  return t;
}

function showError(el, e) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = e.message;
  el.appendChild(p);
}

function renderSimilarity() {
  try {
    const v = call(similarityMatrix, $("kind").value, $("side").value);
    $("attrs").replaceChildren(table(["", ...v.attributes], v.rows.map((r, i) => [v.labels[i], ...r])));
    const m = table(["", ...v.labels], v.matrix.map((r, i) => [v.labels[i], ...r.map(fmt)]));
    if (v.terms) {
      [...m.rows].slice(1).forEach((row, a) => {
        [...row.cells].slice(1).forEach((cell, b) => {
          cell.style.cursor = "pointer";
          cell.onclick = () => {
            const lines = v.terms[a][b].map(
              (t) => `${t.attribute.padEnd(10)} ${t.x.padEnd(10)} ~ ${t.y.padEnd(10)} intra ${fmt(t.intra)}  inter ${fmt(t.inter)}  product ${fmt(t.intra * t.inter)}`
            );
            $("terms").textContent = `${v.labels[a]} vs ${v.labels[b]}\n${lines.join("\n")}\nsum ${fmt(v.matrix[a][b])}`;
          };
        });
      });
    }
    $("matrix").replaceChildren(m);
    $("terms").textContent = "";
  } catch (e) {
    showError($("matrix"), e);
  }
}

function renderCompletion() {
  try {
    const params = {
      alpha: +$("c-alpha").value,
      beta: +$("c-beta").value,
      d: +$("c-d").value,
      k: 3,
      learning_rate: 0.05,
      epochs: 500,
    };
    const c = call(toyCompletion, $("variant").value, JSON.stringify(params));
    const t = table(["", ...c.items], c.predicted.map((r, u) => [c.users[u], ...r.map(fmt)]));
    [...t.rows].slice(1).forEach((row, u) => {
      [...row.cells].slice(1).forEach((cell, i) => {
        if (c.observed[u][i] !== null) {
          cell.className = "obs";
          cell.title = `observed ${c.observed[u][i]}`;
        }
      });
    });
    const note = document.createElement("p");
    note.textContent = `Bold cells were observed; the others are predictions. Final objective ${fmt(c.final_objective)}.`;
    $("completion").replaceChildren(t, note);
  } catch (e) {
    showError($("completion"), e);
  }
}

function drawCurves(data) {
  const canvas = $("curves");
  const ctx = canvas.getContext("2d");
  const pad = 50;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const all = data.curves.flatMap((c) => c.objective);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const n = Math.max(...data.curves.map((c) => c.objective.length)) - 1 || 1;
  const x = (i) => pad + (i / n) * w;
  const y = (v) => pad + h - ((v - lo) / (hi - lo || 1)) * h;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#222";
  ctx.font = "12px system-ui";
  ctx.fillText(hi.toFixed(1), 4, pad + 4);
  ctx.fillText(lo.toFixed(1), 4, pad + h);
  ctx.fillText("epoch", pad + w / 2, canvas.height - 10);
  ctx.fillText(String(n), pad + w - 10, pad + h + 16);
  const colors = { CMF: "#c0392b", PMF: "#2c6fbb" };
  data.curves.forEach((c, k) => {
    ctx.strokeStyle = colors[c.method] || "#444";
    ctx.beginPath();
    c.objective.forEach((v, i) => (i === 0 ? ctx.moveTo(x(i), y(v)) : ctx.lineTo(x(i), y(v))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(`${c.method} objective`, pad + w - 120, pad + 16 + 16 * k);
  });
}

function renderCurves() {
  try {
    const params = {
      alpha: +$("alpha").value,
      beta: +$("beta").value,
      lambda: +$("lambda").value,
      d: +$("d").value,
      learning_rate: +$("eta").value,
      epochs: +$("epochs").value,
      seed: +$("seed").value,
    };
    const data = call(trainingCurves, JSON.stringify(params));
    const rows = data.curves.map((c) => [c.method, fmt(c.test_mae), fmt(c.test_rmse), c.objective.length - 1]);
    rows.push(["training mean", "", fmt(data.constant_rmse), ""]);
    const note = document.createElement("p");
    note.textContent = `${data.n_ratings} ratings, ${data.n_test} held out.`;
    $("curve-summary").replaceChildren(note, table(["model", "MAE", "RMSE", "epochs"], rows));
    drawCurves(data);
  } catch (e) {
    showError($("curve-summary"), e);
  }
}

await init();
$("side").onchange = renderSimilarity;
$("kind").onchange = renderSimilarity;
$("complete").onclick = renderCompletion;
$("run").onclick = renderCurves;
renderSimilarity();
renderCompletion();
renderCurves();
