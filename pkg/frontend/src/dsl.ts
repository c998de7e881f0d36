// Local mirror of the rule grammar, for fast feedback while typing.
// The server remains the single authority; this only gates the step button
// and anchors error markers. Grammar:
//   rule   := name "(" var ")" ":-" clause (";" clause)* "."
//   clause := atom ("," atom)*
//   atom   := ["!"] name "(" term ("," term)* ")"
//   term   := Var | ident | number

export interface ParsedAtom {
  negated: boolean;
  name: string;
  args: string[];
  text: string;
}

export type ParsedClause = ParsedAtom[];

export interface ParsedRule {
  label: string;
  headVar: string;
  clauses: ParsedClause[];
}

export interface ParseFailure {
  message: string;
  position: number;
}

export type ParseResult =
  | { ok: true; rule: ParsedRule }
  | { ok: false; error: ParseFailure };

interface Token {
  kind: "name" | "number" | "punct" | "arrow" | "eof";
  value: string;
  pos: number;
}

const TOKEN = /\s+|:-|-?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?|[A-Za-z][A-Za-z0-9_]*|[(),;.!]/y;

function tokenize(text: string): Token[] | ParseFailure {
  const tokens: Token[] = [];
  let pos = 0;
  while (pos < text.length) {
    TOKEN.lastIndex = pos;
    const m = TOKEN.exec(text);
    if (!m || m.index !== pos) {
      return { message: `unexpected character '${text[pos]}'`, position: pos };
    }
    const value = m[0];
    if (!/^\s+$/.test(value)) {
      let kind: Token["kind"];
      if (value === ":-") kind = "arrow";
      else if (/^[A-Za-z]/.test(value)) kind = "name";
      else if (/^[(),;.!]$/.test(value)) kind = "punct";
      else kind = "number";
      tokens.push({ kind, value, pos });
    }
    pos += value.length;
  }
  tokens.push({ kind: "eof", value: "", pos: text.length });
  return tokens;
}

const isVar = (name: string) => /^[A-Z]/.test(name);

export function parseRule(text: string): ParseResult {
  const tokens = tokenize(text);
  if (!Array.isArray(tokens)) return { ok: false, error: tokens };
  let i = 0;
  const fail = (message: string): ParseResult => ({
    ok: false,
    error: { message, position: tokens[i].pos },
  });
  const take = (pred: (t: Token) => boolean, what: string): Token | null =>
    pred(tokens[i]) ? tokens[i++] : null;

  const label = take((t) => t.kind === "name", "label");
  if (!label) return fail("expected a rule label");
  if (!take((t) => t.value === "(", "(")) return fail("expected '('");
  const head = take((t) => t.kind === "name" && isVar(t.value), "head variable");
  if (!head) return fail("head argument must be a variable");
  if (!take((t) => t.value === ")", ")")) return fail("expected ')'");
  if (!take((t) => t.kind === "arrow", ":-")) return fail("expected ':-'");

  const atom = (): ParsedAtom | ParseResult => {
    const start = tokens[i].pos;
    const negated = Boolean(take((t) => t.value === "!", "!"));
    const name = take((t) => t.kind === "name", "predicate");
    if (!name) return fail("expected a predicate name");
    if (!take((t) => t.value === "(", "(")) return fail("expected '(' after predicate");
    const args: string[] = [];
    for (;;) {
      const term = take((t) => t.kind === "name" || t.kind === "number", "term");
      if (!term) return fail("expected a term");
      args.push(term.value);
      if (take((t) => t.value === ",", ",")) continue;
      break;
    }
    if (!take((t) => t.value === ")", ")")) return fail("expected ')' or ','");
    const end = i < tokens.length ? tokens[i - 1].pos + 1 : text.length;
    return { negated, name: name.value, args, text: text.slice(start, end) };
  };

  const clauses: ParsedClause[] = [];
  for (;;) {
    if (tokens[i].value === "." || tokens[i].kind === "eof" || tokens[i].value === ";") {
      return fail("empty clause");
    }
    const clause: ParsedClause = [];
    for (;;) {
      const a = atom();
      if ("ok" in a) return a;
      clause.push(a);
      if (take((t) => t.value === ",", ",")) continue;
      break;
    }
    clauses.push(clause);
    if (take((t) => t.value === ";", ";")) continue;
    break;
  }
  if (!take((t) => t.value === ".", ".")) return fail("expected '.', ';' or ','");
  if (tokens[i].kind !== "eof") return fail("trailing input after '.'");
  return {
    ok: true,
    rule: { label: label.value, headVar: head.value, clauses },
  };
}

/** Canonical one-line text of a parsed clause, for diffing. */
export function clauseText(clause: ParsedClause): string {
  return clause
    .map((a) => `${a.negated ? "!" : ""}${a.name}(${a.args.join(",")})`)
    .join(", ");
}
