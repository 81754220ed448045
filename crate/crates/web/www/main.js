import init, { learn_and_segment, transliterate, score } from "./pkg/subword_web.js";

const $ = (id) => document.getElementById(id);

function show(el, result) {
  el.classList.toggle("error", "error" in result);
  return !("error" in result);
}

function row(cells, tag = "td") {
  const tr = document.createElement("tr");
  for (const c of cells) {
    const td = document.createElement(tag);
    td.textContent = c;
    tr.append(td);
  }
  return tr;
}

function learn() {
  const out = $("segmented");
  const r = JSON.parse(learn_and_segment(
    $("training").value, Number($("merges").value), Number($("minfreq").value), $("text").value));
  $("rules").replaceChildren();
  $("traces").replaceChildren();
  if (!show(out, r)) {
    out.textContent = r.error;
    return;
  }
  out.textContent = r.segmented;
  $("rules").append(row(["rank", "pair", "count"], "th"));
  r.rules.forEach((m, i) => $("rules").append(row([i, `${m.left} ${m.right}`, m.count])));
  for (const t of r.traces) {
    const pre = document.createElement("pre");
    const lines = [`${t.word}: ${t.start.join(" ")}`];
    for (const s of t.steps) lines.push(`  #${s.rank} ${s.rule} -> ${s.symbols.join(" ")}`);
    pre.textContent = lines.join("\n");
    $("traces").append(pre);
  }
}

function translit(direction) {
  const out = $("translit-out");
  const r = JSON.parse(transliterate($("translit-in").value, direction));
  if (!show(out, r)) {
    out.textContent = r.error;
    return;
  }
  const spans = r.untranslatable.map((u) => `  at ${u.start}: ${JSON.stringify(u.text)}`);
  out.textContent = r.text + (spans.length ? "\n\nno preimage:\n" + spans.join("\n") : "");
}

function scoreText() {
  const out = $("scores");
  const r = JSON.parse(score($("hyp").value, $("ref").value, Number($("beta").value), Number($("maxn").value)));
  if (!show(out, r)) {
    out.textContent = r.error;
    return;
  }
  const pct = (x) => (100 * x).toFixed(2);
  out.textContent = `chrF   ${r.chrf.toFixed(2)}\nunigram P ${pct(r.precision)}  R ${pct(r.recall)}  F1 ${pct(r.f1)}`;
}

await init();
$("learn").onclick = learn;
document.querySelectorAll("[data-dir]").forEach((b) => (b.onclick = () => translit(b.dataset.dir)));
$("score").onclick = scoreText;
learn();
scoreText();
