/** Pure HTML rendering: API response in, markup string out.
 *
 * Keeping these as string -> string functions (no DOM access) makes every
 * view snapshot-testable headlessly; main.ts only assigns the results to
 * innerHTML.
 */

import { AnnotatedDocument, LabelCatalog, WordRecord } from "./api.js";
import { colorForLabel } from "./colors.js";
import { spanByToken, Span } from "./spans.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderTokenRow(sentence: WordRecord[]): string {
  const cells = sentence.map((rec) => {
    const color = colorForLabel(rec.pos);
    return (
      `<span class="token"><span class="word">${escapeHtml(rec.word)}</span>` +
      `<span class="tag" style="background:${color}">${escapeHtml(rec.pos)}</span></span>`
    );
  });
  return `<div class="row tokens">${cells.join("")}</div>`;
}

/** One element per span: a 2-token entity becomes a single highlight. */
function renderSpanRow(
  sentence: WordRecord[],
  labels: string[],
  kind: "chunk" | "ner",
): string {
  const cover = spanByToken(labels);
  const parts: string[] = [];
  let i = 0;
  while (i < sentence.length) {
    const span: Span | null = cover[i];
    if (span === null) {
      parts.push(`<span class="gap">${escapeHtml(sentence[i].word)}</span>`);
      i += 1;
      continue;
    }
    const words = sentence
      .slice(span.start, span.end + 1)
      .map((r) => escapeHtml(r.word))
      .join(" ");
    const color = colorForLabel(span.label);
    parts.push(
      `<span class="seg" data-label="${escapeHtml(span.label)}" ` +
        `style="background:${color}">${words}` +
        `<span class="seg-label">${escapeHtml(span.label)}</span></span>`,
    );
    i = span.end + 1;
  }
  return `<div class="row ${kind}s">${parts.join("")}</div>`;
}

export function renderSentence(sentence: WordRecord[]): string {
  const chunkLabels = sentence.map((r) => r.chunk);
  const nerLabels = sentence.map((r) => r.ner);
  return (
    `<div class="sentence">` +
    renderTokenRow(sentence) +
    renderSpanRow(sentence, chunkLabels, "chunk") +
    renderSpanRow(sentence, nerLabels, "ner") +
    `</div>`
  );
}

export function renderDocument(doc: AnnotatedDocument): string {
  if (doc.sentences.length === 0) {
    return `<p class="empty">No sentences found.</p>`;
  }
  return doc.sentences.map(renderSentence).join("");
}

export function renderHelp(catalog: LabelCatalog): string {
  const tasks: Array<[string, keyof LabelCatalog]> = [
    ["Part-of-speech tags", "pos"],
    ["Chunk types", "chunk"],
    ["Named entity types", "ner"],
  ];
  const sections = tasks.map(([title, key]) => {
    const items = catalog[key]
      .map(
        (entry) =>
          `<li><span class="chip" style="background:${colorForLabel(entry.label)}">` +
          `${escapeHtml(entry.label)}</span> ${escapeHtml(entry.description)}</li>`,
      )
      .join("");
    return `<section class="legend-group"><h3>${title}</h3><ul>${items}</ul></section>`;
  });
  return sections.join("");
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}
