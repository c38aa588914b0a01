import init, { solve, groundTruth, measures } from "./pkg/synthrank_web.js";

const $ = (id) => document.getElementById(id);
const out = $("out");

function table(head, rows) {
  const t = document.createElement("table");
  const tr = t.insertRow();
  for (const h of head) {
    const th = document.createElement("th");
    th.textContent = h;
    tr.appendChild(th);
  }
  for (const r of rows) {
    const row = t.insertRow();
    for (const c of r) row.insertCell().textContent = c;
  }
  return t;
}

function run(fn) {
  $("error").textContent = "";
  out.replaceChildren();
  try {
    fn($("formula").value, $("sys").value);
  } catch (e) {
    $("error").textContent = String(e.message ?? e);
  }
}

function showSolve(f, s) {
  const r = JSON.parse(solve(f, s));
  const p = document.createElement("p");
  p.textContent = `${r.vertices} vertices, ${r.edges} edges; initial vertex won by ${r.initial_winner}.`;
  out.append(p, table(["vertex", "target", "output"], r.strategy.map((x) => [x.vertex, x.target, x.valuation])));
  const pre = document.createElement("pre");
  pre.textContent = JSON.stringify(r.game, null, 1);
  out.append(pre);
}

function showGt(f, s) {
  const r = JSON.parse(groundTruth(f, s, Number($("samples").value), Number($("seed").value)));
  if (r.notice) out.append(Object.assign(document.createElement("p"), { textContent: r.notice }));
  out.append(table(["source", "target", "valuation", "value"],
    r.entries.map((x) => [x.source, x.target, x.valuation, x.value.toFixed(4) + (x.trivial ? " *" : "")])));
}

function showMeasures(f, s) {
  const r = JSON.parse(measures(f, s));
  out.append(table(["measure", "value"], Object.entries(r).map(([k, v]) => [k, String(v)])));
}

await init();
for (const [id, fn] of [["solve", showSolve], ["gt", showGt], ["measures", showMeasures]]) {
  $(id).disabled = false;
  $(id).addEventListener("click", () => run(fn));
}
