import type { ServerEvent, SessionSnapshot } from './types.js';

export interface ConnectionHandlers {
  onEvent: (event: ServerEvent) => void;
  /** authoritative refetch after connect or a stream drop */
  onSnapshot: (snapshot: SessionSnapshot, lastSeq: number) => void;
  onError?: (message: string) => void;
}

export interface Connection {
  close: () => void;
}

const BASE = '';

export async function createSession(dims?: number[]): Promise<string> {
  const response = await fetch(`${BASE}/sessions`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(dims ? { dims } : {}),
  });
  if (!response.ok) {
    throw new Error(`session creation failed: ${response.status}`);
  }
  const body = (await response.json()) as { id: string };
  return body.id;
}

export async function fetchState(sessionId: string): Promise<SessionSnapshot> {
  const response = await fetch(`${BASE}/sessions/${sessionId}/state`);
  if (!response.ok) {
    throw new Error(`no such session: ${sessionId}`);
  }
  return (await response.json()) as SessionSnapshot;
}

/**
 * Subscribe to the session event stream. The snapshot is fetched first, then
 * events after its sequence number are applied incrementally; on a dropped
 * stream the client resubscribes and refetches so the view converges.
 */
export function connect(sessionId: string, handlers: ConnectionHandlers): Connection {
  let source: EventSource | null = null;
  let lastSeq = 0;
  let closed = false;

  const resubscribe = async () => {
    if (closed) {
      return;
    }
    try {
      const snapshot = await fetchState(sessionId);
      handlers.onSnapshot(snapshot, lastSeq);
    } catch (error) {
      handlers.onError?.(String(error));
      return;
    }
    source = new EventSource(`/sessions/${sessionId}/events?since=${lastSeq}`);
    source.onmessage = (message) => {
      const event = JSON.parse(message.data) as ServerEvent;
      lastSeq = Math.max(lastSeq, event.seq);
      handlers.onEvent(event);
    };
    source.onerror = () => {
      source?.close();
      source = null;
      if (!closed) {
        setTimeout(resubscribe, 1000);
      }
    };
  };

  void resubscribe();
  return {
    close: () => {
      closed = true;
      source?.close();
    },
  };
}

export async function sendUtterance(sessionId: string, text: string): Promise<void> {
  const response = await fetch(`${BASE}/sessions/${sessionId}/messages`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({ text }),
  });
  if (response.status === 409) {
    throw new Error('busy');
  }
  if (!response.ok) {
    throw new Error(`message rejected: ${response.status}`);
  }
}
