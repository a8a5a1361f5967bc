export interface BlockRecord {
  x: number;
  y: number;
  z: number;
  color: string;
}

export type ServerEvent =
  | { seq: number; type: 'say'; text: string }
  | { seq: number; type: 'architect'; text: string }
  | { seq: number; type: 'world'; placed: BlockRecord[]; removed: BlockRecord[] }
  | { seq: number; type: 'repository'; name: string }
  | { seq: number; type: 'state'; state: string };

export interface ChatLine {
  turn: number;
  speaker: 'architect' | 'builder';
  text: string;
}

export interface ViewState {
  /** key "x,y,z" -> color; mirrors the server snapshot after event replay */
  blocks: ReadonlyMap<string, string>;
  chat: readonly ChatLine[];
  stateTag: string;
  repository: readonly string[];
  lastSeq: number;
}

export interface SessionSnapshot {
  id: string;
  dims: number[];
  snapshot: BlockRecord[];
  state: string;
  repository: string[];
  target: BlockRecord[] | null;
}
