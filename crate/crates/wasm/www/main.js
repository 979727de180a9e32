import init, { analyze, word_cloud, fold_label, sample_corpus, sample_rules } from "./pkg/currimap_wasm.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";
const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

function svgEl(name, attrs, text) {
  const el = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  if (text !== undefined) el.textContent = text;
  return el;
}

// Leaves get consecutive rows, parents sit at the mean row of their children.
function layout(root, edges) {
  const children = new Map();
  for (const e of edges) {
    if (!children.has(e.source)) children.set(e.source, []);
    children.get(e.source).push(e.target);
  }
  const pos = new Map();
  let row = 0;
  let maxDepth = 0;
  const visit = (node, depth) => {
    maxDepth = Math.max(maxDepth, depth);
    const kids = (children.get(node) || []).slice().sort();
    if (kids.length === 0) {
      pos.set(node, { depth, row: row++ });
      return;
    }
    const rows = kids.map((k) => { visit(k, depth + 1); return pos.get(k).row; });
    pos.set(node, { depth, row: (rows[0] + rows[rows.length - 1]) / 2 });
  };
  visit(root, 0);
  return { pos, rows: row, maxDepth };
}

function drawTree(result) {
  const community = new Map(result.nodes.map((n) => [n.topic, n.community]));
  const { pos, rows, maxDepth } = layout(result.summary.root, result.backbone);
  const colW = 190, rowH = 20, pad = 20;
  const width = (maxDepth + 1) * colW + 2 * pad;
  const height = Math.max(rows, 1) * rowH + 2 * pad;
  const xy = (t) => [pad + 8 + pos.get(t).depth * colW, pad + pos.get(t).row * rowH];
  const svg = svgEl("svg", { width, height });
  for (const e of result.backbone) {
    const [x1, y1] = xy(e.source);
    const [x2, y2] = xy(e.target);
    const mid = (x1 + x2) / 2;
    svg.append(svgEl("path", {
      d: `M${x1},${y1} C${mid},${y1} ${mid},${y2} ${x2},${y2}`,
      fill: "none", stroke: "#aaa", "stroke-width": Math.max(0.5, 3 / e.weight / 3),
    }));
  }
  for (const [topic] of pos) {
    const [x, y] = xy(topic);
    const color = PALETTE[community.get(topic) % PALETTE.length];
    const g = svgEl("g", {});
    g.append(svgEl("circle", { cx: x, cy: y, r: topic === result.summary.root ? 6 : 4, fill: color }));
    g.append(svgEl("text", { x: x + 8, y: y + 4 }, topic));
    g.append(svgEl("title", {}, `${topic}\ncommunity ${community.get(topic)}`));
    svg.append(g);
  }
  $("tree").replaceChildren(svg);
}

function runAnalysis() {
  try {
    const result = JSON.parse(analyze(
      $("corpus").value, $("rules").value,
      Number($("min-weight").value), Number($("seed").value) || 0,
      Number($("resolution").value), $("tree-mode").value,
    ));
    const s = result.summary;
    $("summary").textContent =
      `${s.topics} topics, ${s.network_edges} edges; ${s.threshold_nodes} after threshold; ` +
      `largest SCC ${s.scc_nodes} topics / ${s.scc_edges} edges; ` +
      `${s.communities} communities, Q = ${s.modularity.toFixed(4)}; ` +
      `root "${s.root}", total distance ${s.total_distance.toFixed(4)}`;
    drawTree(result);
    $("error").textContent = "";
  } catch (e) {
    $("summary").textContent = "";
    $("tree").replaceChildren();
    $("error").textContent = String(e);
  }
}

function runCloud() {
  try {
    const words = JSON.parse(word_cloud(
      $("corpus").value, $("rules").value,
      Number($("top-k").value), 40, $("per-course").checked,
    ));
    $("cloud").replaceChildren(...words.map((w) => {
      const span = document.createElement("span");
      span.textContent = w.topic;
      span.style.fontSize = `${w.size.toFixed(1)}px`;
      span.title = `${w.count}`;
      return span;
    }));
  } catch (e) {
    $("cloud").textContent = String(e);
  }
}

function runFold() {
  try {
    $("folded").textContent = `→ "${fold_label($("raw-label").value)}"`;
  } catch (e) {
    $("folded").textContent = String(e);
  }
}

function bindValue(id, fmt) {
  const update = () => { $(`${id}-value`).textContent = fmt($(id).value); };
  $(id).addEventListener("input", update);
  update();
}

await init();
$("corpus").value = sample_corpus();
$("rules").value = sample_rules();
bindValue("min-weight", (v) => v);
bindValue("resolution", (v) => Number(v).toFixed(1));
bindValue("top-k", (v) => v);
for (const id of ["corpus", "rules", "min-weight", "resolution", "seed", "tree-mode"]) {
  $(id).addEventListener("input", runAnalysis);
}
for (const id of ["corpus", "rules", "top-k", "per-course"]) {
  $(id).addEventListener("input", runCloud);
}
$("raw-label").addEventListener("input", runFold);
runAnalysis();
runCloud();
runFold();
