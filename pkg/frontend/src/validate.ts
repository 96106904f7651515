// Mirrors the service's record validation so the deposit form can show the
// same violation codes the API would return.

import { DATA_TYPES, DataType, REGISTRY, fieldPath, lookup } from "./schema.js";

export interface FormField {
  schema: "dc" | "lago";
  element: string;
  qualifier: string | null;
  value: string;
  lang?: string | null;
}

export type ViolationCode =
  | "MissingRequired"
  | "UnknownField"
  | "TypeMismatch"
  | "VocabularyViolation"
  | "IntervalInverted";

export interface Violation {
  path: string;
  code: ViolationCode;
  message: string;
}

const UTC_RE = /^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$/;
const DECIMAL_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)$/;

export function parseUtc(value: string): number | null {
  if (!UTC_RE.test(value)) return null;
  const ms = Date.parse(value);
  if (Number.isNaN(ms)) return null;
  // reject out-of-range components Date.parse would roll over (e.g. day 32)
  return new Date(ms).toISOString().replace(".000Z", "Z") === value ? ms : null;
}

function kindError(kind: string, value: string): string | null {
  if (kind === "datetime-utc" && parseUtc(value) === null) {
    return "expected a YYYY-MM-DDThh:mm:ssZ datetime";
  }
  if (kind === "decimal" && !DECIMAL_RE.test(value)) {
    return "expected a decimal number";
  }
  return null;
}

export function validateRecord(fields: readonly FormField[], datatype: DataType): Violation[] {
  const violations: Violation[] = [];
  const seen = new Map<string, number>();

  for (const f of fields) {
    const path = fieldPath(f.schema, f.element, f.qualifier);
    const entry = lookup(f.schema, f.element, f.qualifier);
    if (!entry) {
      violations.push({ path, code: "UnknownField", message: "not in the schema registry" });
      continue;
    }
    seen.set(path, (seen.get(path) ?? 0) + 1);
    if (!f.value.trim()) {
      violations.push({ path, code: "TypeMismatch", message: "empty value" });
      continue;
    }
    const error = kindError(entry.kind, f.value);
    if (error) {
      violations.push({ path, code: "TypeMismatch", message: error });
      continue;
    }
    if (entry.kind === "controlled(datatype)" && !(DATA_TYPES as readonly string[]).includes(f.value)) {
      violations.push({
        path,
        code: "VocabularyViolation",
        message: `value must be one of ${DATA_TYPES.join(", ")}`,
      });
    }
  }

  for (const entry of REGISTRY) {
    const path = fieldPath(entry.schema, entry.element, entry.qualifier);
    const count = seen.get(path) ?? 0;
    if (!entry.multivalued && count > 1) {
      violations.push({ path, code: "VocabularyViolation", message: "element is single-valued" });
    }
    if (entry.requiredFor.includes(datatype) && count === 0) {
      violations.push({ path, code: "MissingRequired", message: `required for datatype ${datatype}` });
    }
  }

  const start = fields.find((f) => f.schema === "lago" && f.element === "capture" && f.qualifier === "start");
  const end = fields.find((f) => f.schema === "lago" && f.element === "capture" && f.qualifier === "end");
  if (start && end) {
    const a = parseUtc(start.value);
    const b = parseUtc(end.value);
    if (a !== null && b !== null && b < a) {
      violations.push({
        path: "lago.capture.end",
        code: "IntervalInverted",
        message: "capture end precedes capture start",
      });
    }
  }

  violations.sort((x, y) =>
    x.path === y.path
      ? x.code === y.code
        ? x.message.localeCompare(y.message)
        : x.code.localeCompare(y.code)
      : x.path.localeCompare(y.path),
  );
  return violations;
}

export interface FileAttrs {
  filename: string;
  role: string;
  license: string | null;
}

function escapeValue(value: string): string {
  return value.replace(/\\/g, "\\\\").replace(/\n/g, "\\n");
}

/** Render the deposit form state as the manifest text the API expects. */
export function buildManifest(fields: readonly FormField[], files: readonly FileAttrs[] = []): string {
  const lines: string[] = [];
  for (const f of fields) {
    let key = fieldPath(f.schema, f.element, f.qualifier);
    if (f.lang) key += `@${f.lang}`;
    lines.push(`${key} = ${escapeValue(f.value)}`);
  }
  for (const file of files) {
    lines.push(`file = ${file.filename},${file.role},${file.license ?? ""}`);
  }
  return lines.join("\n") + "\n";
}
