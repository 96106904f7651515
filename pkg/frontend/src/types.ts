export interface Node {
  id: number;
  kind: "community" | "subcommunity" | "collection";
  name: string;
  slug: string;
  parent: number | null;
  datatype: string | null;
  set_spec: string;
}

export interface CommunityNode extends Node {
  children: CommunityNode[];
}

export interface Field {
  schema: "dc" | "lago";
  element: string;
  qualifier: string | null;
  value: string;
  lang: string | null;
}

export interface Bitstream {
  seq: number;
  filename: string;
  role: string;
  media_type: string;
  size: number;
  sha256: string;
  license: string | null;
}

export interface Item {
  pid: string;
  collection: number;
  set_spec: string;
  datestamp: string;
  withdrawn: boolean;
  record: Field[];
  bitstreams: Bitstream[];
}

export interface StatsRow {
  pid: string;
  count: number;
}

export interface StatsReport {
  visits: number;
  downloads: number;
  top_downloaded: StatsRow[];
  top_viewed: StatsRow[];
}

export interface ApiErrorBody {
  error: string;
  message: string;
  report?: { violations: { code: string; path: string; message: string }[] };
}
