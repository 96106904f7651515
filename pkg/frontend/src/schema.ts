// Client-side copy of the server's metadata schema registry. Kept in sync
// with the service so the deposit form can reject bad records before upload;
// the server remains the authority.

export const DATA_TYPES = ["calibration", "wcd-raw", "simulated", "document"] as const;
export type DataType = (typeof DATA_TYPES)[number];

export const DC_ELEMENTS = [
  "title", "subject", "description", "source", "language", "relation",
  "coverage", "creator", "publisher", "contributor", "rights", "date",
  "type", "format", "identifier",
] as const;

export const FILE_ROLES = ["data", "calibration", "graphic", "postprocessed", "other"] as const;

export const CC_LICENSES = [
  "CC-BY", "CC-BY-SA", "CC-BY-ND", "CC-BY-NC", "CC-BY-NC-SA", "CC-BY-NC-ND", "CC0",
] as const;

export type ValueKind = "text" | "datetime-utc" | "decimal" | "identifier" | "controlled(datatype)";

export interface RegistryEntry {
  schema: "dc" | "lago";
  element: string;
  qualifier: string | null;
  kind: ValueKind;
  multivalued: boolean;
  requiredFor: readonly DataType[];
}

const DETECTOR_TYPES: readonly DataType[] = ["calibration", "wcd-raw", "simulated"];

const lago = (
  element: string,
  qualifier: string | null,
  kind: ValueKind,
  multivalued: boolean,
  requiredFor: readonly DataType[] = [],
): RegistryEntry => ({ schema: "lago", element, qualifier, kind, multivalued, requiredFor });

export const REGISTRY: readonly RegistryEntry[] = [
  ...DC_ELEMENTS.map<RegistryEntry>((element) => ({
    schema: "dc",
    element,
    qualifier: null,
    kind: "text",
    multivalued: true,
    requiredFor: element === "title" ? DATA_TYPES : [],
  })),
  lago("responsible", null, "text", false, DETECTOR_TYPES),
  lago("contact", null, "text", false, DETECTOR_TYPES),
  lago("capture", "start", "datetime-utc", false, ["wcd-raw"]),
  lago("capture", "end", "datetime-utc", false, ["wcd-raw"]),
  lago("calibration", "ref", "identifier", false),
  lago("resources", null, "text", true),
  lago("problems", null, "text", true),
  lago("pmt", "temperature", "decimal", false),
  lago("pmt", "voltage", "decimal", false),
  lago("site", null, "text", false),
  lago("datatype", null, "controlled(datatype)", false, DETECTOR_TYPES),
];

export function fieldPath(schema: string, element: string, qualifier: string | null): string {
  return qualifier ? `${schema}.${element}.${qualifier}` : `${schema}.${element}`;
}

export function lookup(
  schema: string,
  element: string,
  qualifier: string | null,
): RegistryEntry | undefined {
  return REGISTRY.find(
    (e) => e.schema === schema && e.element === element && e.qualifier === qualifier,
  );
}
