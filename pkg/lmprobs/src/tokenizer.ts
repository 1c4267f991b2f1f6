/**
 * The model's own tokenizer: lowercase maximal runs of ASCII letters and
 * digits. Record positions are counted in these tokens, so readers of the
 * output must not assume whitespace token counts.
 */
const TOKEN_RE = /[a-z0-9]+/g;

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}
