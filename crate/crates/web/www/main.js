// ./pkg comes from `wasm-bindgen --target web --out-dir www/pkg` (see the README).
import init, { catalog, verify, search, invariant_form } from "./pkg/hgp_web.js";

const $ = (id) => document.getElementById(id);

function params() {
  return [$("alpha").value, $("beta").value];
}

function show(el, fn) {
  try {
    return fn();
  } catch (e) {
    el.textContent = "error: " + (e.message || e);
    return null;
  }
}

function drawLevels(levels) {
  const canvas = $("chart");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!levels.length) return;
  // Log scale: frontiers grow geometrically.
  const top = Math.log10(Math.max(...levels.map((l) => l.frontier)) + 1) || 1;
  const pad = 24;
  const w = (canvas.width - 2 * pad) / levels.length;
  const h = canvas.height - 2 * pad;
  ctx.font = "11px sans-serif";
  levels.forEach((l, i) => {
    const bh = (Math.log10(l.frontier + 1) / top) * h;
    ctx.fillStyle = "#4a6fa5";
    ctx.fillRect(pad + i * w + 1, pad + h - bh, Math.max(w - 2, 1), bh);
    ctx.fillStyle = "#333";
    ctx.fillText(String(l.depth), pad + i * w + w / 2 - 3, canvas.height - 8);
  });
  ctx.fillText("frontier size per level (log scale)", pad, 14);
}

function onVerify() {
  const out = $("verify-out");
  const report = show(out, () => JSON.parse(verify(...params(), $("word").value)));
  $("verdict").textContent = "";
  if (!report) return;
  $("verdict").textContent = report.verdict === "pass" ? "pass" : "fail: " + report.reason;
  $("verdict").className = report.verdict;
  out.textContent = JSON.stringify(report, null, 2);
}

function onSearch() {
  const summary = $("search-summary");
  summary.textContent = "searching…";
  // Let the status paint before the synchronous search blocks the page.
  setTimeout(() => {
    const res = show(summary, () =>
      JSON.parse(search(...params(), Number($("max-entry").value), Number($("max-depth").value))),
    );
    if (!res) return;
    const last = res.levels[res.levels.length - 1];
    if (res.found) {
      summary.textContent = `found ${res.found.word} (length ${res.found.length}), ${last.visited} vectors visited`;
      $("word").value = res.found.word;
    } else {
      summary.textContent = `nothing found, ${last.visited} vectors visited` + (res.truncated ? " (node cap reached)" : "");
    }
    drawLevels(res.levels);
  }, 0);
}

function onForm() {
  const out = $("form-out");
  const res = show(out, () => JSON.parse(invariant_form(...params())));
  if (!res) return;
  const rows = res.omega.map((r) => r.map((x) => String(x).padStart(5)).join(" "));
  out.textContent =
    `f = ${res.f}\ng = ${res.g}\n\nOmega =\n${rows.join("\n")}\n\n` +
    `v_R = [${res.v_r.join(", ")}]\nv_L = [${res.v_l.join(", ")}]\nlambda = ${res.lambda}`;
}

function pick(rows) {
  const r = rows[$("row").selectedIndex];
  $("alpha").value = r.alpha;
  $("beta").value = r.beta;
  $("word").value = r.word;
}

await init();
const rows = JSON.parse(catalog());
for (const r of rows) {
  const opt = document.createElement("option");
  opt.textContent = `${r.label} (table ${r.table})${r.suspect ? " *" : ""}`;
  $("row").appendChild(opt);
}
$("row").addEventListener("change", () => pick(rows));
$("verify").addEventListener("click", onVerify);
$("search").addEventListener("click", onSearch);
$("form").addEventListener("click", onForm);
$("row").selectedIndex = rows.findIndex((r) => r.label === "A-24");
pick(rows);
