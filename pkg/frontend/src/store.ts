import type { BlockRecord, ChatLine, ServerEvent, ViewState } from './types.js';

export function blockKey(record: { x: number; y: number; z: number }): string {
  return `${record.x},${record.y},${record.z}`;
}

export function initialViewState(): ViewState {
  return { blocks: new Map(), chat: [], stateTag: 'new', repository: [], lastSeq: 0 };
}

/**
 * Fold one server event into the view state. Pure: always returns a fresh
 * state value, never mutates the input. Applying a session's events in order
 * reproduces the server's snapshot block-for-block.
 */
export function applyEvent(state: ViewState, event: ServerEvent): ViewState {
  if (event.seq <= state.lastSeq) {
    return state; // replay overlap after a resubscribe; already applied
  }
  const next = {
    blocks: state.blocks,
    chat: state.chat,
    stateTag: state.stateTag,
    repository: state.repository,
    lastSeq: event.seq,
  };
  switch (event.type) {
    case 'say':
      next.chat = [...state.chat, line(state, 'builder', event.text)];
      break;
    case 'architect':
      next.chat = [...state.chat, line(state, 'architect', event.text)];
      break;
    case 'world': {
      const blocks = new Map(state.blocks);
      for (const record of event.placed) {
        blocks.set(blockKey(record), record.color);
      }
      for (const record of event.removed) {
        blocks.delete(blockKey(record));
      }
      next.blocks = blocks;
      break;
    }
    case 'repository':
      next.repository = state.repository.includes(event.name)
        ? state.repository
        : [...state.repository, event.name];
      break;
    case 'state':
      next.stateTag = event.state;
      break;
  }
  return next;
}

function line(state: ViewState, speaker: ChatLine['speaker'], text: string): ChatLine {
  return { turn: state.chat.length + 1, speaker, text };
}

export function applyEvents(state: ViewState, events: ServerEvent[]): ViewState {
  return events.reduce(applyEvent, state);
}

/**
 * Replace the mirrored world with an authoritative server snapshot, keeping
 * the chat history. Used on connect and after an event-stream drop.
 */
export function reconcile(
  state: ViewState,
  snapshot: BlockRecord[],
  stateTag: string,
  repository: string[],
  lastSeq: number,
): ViewState {
  const blocks = new Map<string, string>();
  for (const record of snapshot) {
    blocks.set(blockKey(record), record.color);
  }
  return { blocks, chat: state.chat, stateTag, repository, lastSeq };
}

export function blocksEqual(state: ViewState, snapshot: BlockRecord[]): boolean {
  if (state.blocks.size !== snapshot.length) {
    return false;
  }
  return snapshot.every((record) => state.blocks.get(blockKey(record)) === record.color);
}
