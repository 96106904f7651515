import { describe, expect, it } from "vitest";

import { FormField, buildManifest, parseUtc, validateRecord } from "../src/validate.js";

const field = (
  schema: "dc" | "lago",
  element: string,
  qualifier: string | null,
  value: string,
  lang: string | null = null,
): FormField => ({ schema, element, qualifier, value, lang });

function goodWcdRaw(): FormField[] {
  return [
    field("dc", "title", null, "run 17"),
    field("lago", "responsible", null, "Ana Perez"),
    field("lago", "contact", null, "ana@ula.ve"),
    field("lago", "datatype", null, "wcd-raw"),
    field("lago", "capture", "start", "2008-05-01T10:00:00Z"),
    field("lago", "capture", "end", "2008-05-02T10:00:00Z"),
  ];
}

describe("parseUtc", () => {
  it("accepts strict Zulu datetimes", () => {
    expect(parseUtc("2008-05-01T10:00:00Z")).toBe(Date.parse("2008-05-01T10:00:00Z"));
  });

  it("rejects other shapes", () => {
    for (const bad of ["2008-05-01", "2008-05-01 10:00:00", "2008-05-01T10:00:00+00:00",
                       "2008-13-01T10:00:00Z", "2008-05-32T10:00:00Z", "yesterday"]) {
      expect(parseUtc(bad), bad).toBeNull();
    }
  });
});

describe("validateRecord", () => {
  it("passes a complete wcd-raw record", () => {
    expect(validateRecord(goodWcdRaw(), "wcd-raw")).toEqual([]);
  });

  it("documents only need a title", () => {
    expect(validateRecord([field("dc", "title", null, "handbook")], "document")).toEqual([]);
  });

  it("flags every missing required field", () => {
    const violations = validateRecord([], "wcd-raw");
    expect(violations.map((v) => v.path).sort()).toEqual([
      "dc.title", "lago.capture.end", "lago.capture.start",
      "lago.contact", "lago.datatype", "lago.responsible",
    ]);
    expect(new Set(violations.map((v) => v.code))).toEqual(new Set(["MissingRequired"]));
  });

  it("flags unknown fields", () => {
    const violations = validateRecord(
      [...goodWcdRaw(), field("lago", "flavor", null, "vanilla")], "wcd-raw");
    expect(violations).toEqual([
      { path: "lago.flavor", code: "UnknownField", message: "not in the schema registry" },
    ]);
  });

  it("flags type mismatches on datetimes, decimals and blanks", () => {
    const fields = [
      ...goodWcdRaw().filter((f) => f.qualifier !== "start"),
      field("lago", "capture", "start", "mañana"),
      field("lago", "pmt", "voltage", "high"),
      field("dc", "creator", null, "   "),
    ];
    const codes = validateRecord(fields, "wcd-raw").map((v) => [v.path, v.code]);
    expect(codes).toContainEqual(["lago.capture.start", "TypeMismatch"]);
    expect(codes).toContainEqual(["lago.pmt.voltage", "TypeMismatch"]);
    expect(codes).toContainEqual(["dc.creator", "TypeMismatch"]);
  });

  it("flags vocabulary violations for datatype and cardinality", () => {
    const fields = [
      ...goodWcdRaw().filter((f) => f.element !== "datatype"),
      field("lago", "datatype", null, "antimatter"),
      field("lago", "site", null, "Merida"),
      field("lago", "site", null, "Chacaltaya"),
    ];
    const violations = validateRecord(fields, "wcd-raw");
    expect(violations).toContainEqual(expect.objectContaining(
      { path: "lago.datatype", code: "VocabularyViolation" }));
    expect(violations).toContainEqual(expect.objectContaining(
      { path: "lago.site", code: "VocabularyViolation" }));
  });

  it("flags inverted capture intervals", () => {
    const fields = goodWcdRaw().map((f) =>
      f.qualifier === "end" ? { ...f, value: "2008-04-01T10:00:00Z" } : f);
    expect(validateRecord(fields, "wcd-raw")).toEqual([
      { path: "lago.capture.end", code: "IntervalInverted",
        message: "capture end precedes capture start" },
    ]);
  });

  it("multivalued fields may repeat", () => {
    const fields = [
      ...goodWcdRaw(),
      field("lago", "problems", null, "PMT 2 drifted"),
      field("lago", "problems", null, "storm at 03:00"),
      field("dc", "subject", null, "muons"),
      field("dc", "subject", null, "cosmic rays"),
    ];
    expect(validateRecord(fields, "wcd-raw")).toEqual([]);
  });

  it("is order-independent", () => {
    const fields = [...goodWcdRaw(), field("lago", "flavor", null, "x"),
                    field("lago", "pmt", "voltage", "abc")];
    const reversed = [...fields].reverse();
    expect(validateRecord(fields, "wcd-raw")).toEqual(validateRecord(reversed, "wcd-raw"));
  });
});

describe("buildManifest", () => {
  it("renders key = value lines with file attributes", () => {
    const manifest = buildManifest(
      [field("dc", "title", null, "run 17"),
       field("dc", "description", null, "two\nlines", "en"),
       field("lago", "capture", "start", "2008-05-01T10:00:00Z")],
      [{ filename: "run17.dat", role: "data", license: "CC-BY" },
       { filename: "cal.dat", role: "calibration", license: null }],
    );
    expect(manifest).toBe(
      "dc.title = run 17\n" +
      "dc.description@en = two\\nlines\n" +
      "lago.capture.start = 2008-05-01T10:00:00Z\n" +
      "file = run17.dat,data,CC-BY\n" +
      "file = cal.dat,calibration,\n",
    );
  });

  it("escapes backslashes before newlines", () => {
    const manifest = buildManifest([field("dc", "title", null, "a\\b")]);
    expect(manifest).toBe("dc.title = a\\\\b\n");
  });
});
