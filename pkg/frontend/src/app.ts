import { connect, createSession, sendUtterance } from './api.js';
import { buildScene, DEFAULT_OPTIONS, floorOutline, SceneOptions } from './scene.js';
import { applyEvent, blockKey, initialViewState, reconcile } from './store.js';
import type { BlockRecord, ViewState } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export class ArchitectApp {
  private state: ViewState = initialViewState();
  private target: BlockRecord[] | null = null;
  private dims: number[] = [11, 9, 11];
  private sessionId = '';
  private inFlight = false;
  private ySlice = 99;

  constructor(private root: HTMLElement) {
    this.root.innerHTML = `
      <header>
        <h1>blocksmith</h1>
        <span id="session-label"></span>
        <span id="state-tag" class="badge"></span>
      </header>
      <main>
        <section class="pane" id="target-pane" hidden>
          <h2>Target (architect only)</h2>
          <svg id="target-view" viewBox="0 0 520 420"></svg>
        </section>
        <section class="pane">
          <h2>Build region</h2>
          <svg id="world-view" viewBox="0 0 520 420"></svg>
          <label class="slider">
            Visible layers <input id="y-slice" type="range" min="0" max="8" value="8">
          </label>
        </section>
        <section class="pane chat-pane">
          <h2>Chat</h2>
          <ul id="chat"></ul>
          <form id="chat-form">
            <input id="chat-input" autocomplete="off"
                   placeholder="e.g. build a red tower">
            <button type="submit">Send</button>
          </form>
          <div id="notice" class="notice" hidden></div>
          <h2>Known structures</h2>
          <ul id="repository"></ul>
        </section>
      </main>`;
    this.bindInput();
  }

  async start(): Promise<void> {
    this.sessionId = new URLSearchParams(location.search).get('session')
      ?? await createSession();
    (this.query('#session-label') as HTMLElement).textContent = this.sessionId;
    connect(this.sessionId, {
      onSnapshot: (snapshot, lastSeq) => {
        this.dims = snapshot.dims;
        this.target = snapshot.target;
        const slider = this.query('#y-slice') as HTMLInputElement;
        slider.max = String(snapshot.dims[1] ?? 8);
        slider.value = slider.max;
        this.ySlice = Number(slider.max);
        this.state = reconcile(this.state, snapshot.snapshot, snapshot.state,
                               snapshot.repository, lastSeq);
        this.render();
      },
      onEvent: (event) => {
        this.state = applyEvent(this.state, event);
        this.render();
      },
      onError: (message) => this.notify(message),
    });
  }

  private bindInput(): void {
    const form = this.query('#chat-form') as HTMLFormElement;
    const input = this.query('#chat-input') as HTMLInputElement;
    form.addEventListener('submit', async (submit) => {
      submit.preventDefault();
      const text = input.value.trim();
      if (!text || this.inFlight) {
        return;
      }
      this.inFlight = true;
      input.disabled = true;
      try {
        await sendUtterance(this.sessionId, text);
        input.value = '';
      } catch (error) {
        this.notify(error instanceof Error && error.message === 'busy'
          ? 'The builder is still working on the last message.'
          : String(error));
      } finally {
        this.inFlight = false;
        input.disabled = false;
        input.focus();
      }
    });
    (this.query('#y-slice') as HTMLInputElement).addEventListener('input', (change) => {
      this.ySlice = Number((change.target as HTMLInputElement).value);
      this.render();
    });
  }

  private render(): void {
    (this.query('#state-tag') as HTMLElement).textContent = this.state.stateTag;
    this.renderChat();
    this.renderRepository();
    this.renderWorld(this.query('#world-view') as SVGSVGElement, this.state.blocks);
    const targetPane = this.query('#target-pane') as HTMLElement;
    if (this.target && this.target.length) {
      targetPane.hidden = false;
      const blocks = new Map(this.target.map((r) => [blockKey(r), r.color]));
      this.renderWorld(this.query('#target-view') as SVGSVGElement, blocks);
    } else {
      targetPane.hidden = true;
    }
  }

  private renderChat(): void {
    const list = this.query('#chat') as HTMLElement;
    list.innerHTML = '';
    for (const line of this.state.chat) {
      const item = document.createElement('li');
      item.className = line.speaker;
      item.textContent = `${line.speaker === 'architect' ? 'you' : 'builder'}: ${line.text}`;
      list.appendChild(item);
    }
    list.scrollTop = list.scrollHeight;
  }

  private renderRepository(): void {
    const list = this.query('#repository') as HTMLElement;
    list.innerHTML = '';
    for (const name of this.state.repository) {
      const item = document.createElement('li');
      item.textContent = name;
      list.appendChild(item);
    }
  }

  private renderWorld(svg: SVGSVGElement, blocks: ReadonlyMap<string, string>): void {
    const opts: SceneOptions = { ...DEFAULT_OPTIONS, maxY: this.ySlice };
    svg.innerHTML = '';
    for (const outline of floorOutline(this.dims[0] ?? 11, this.dims[2] ?? 11, opts)) {
      const line = document.createElementNS(SVG_NS, 'polyline');
      line.setAttribute('points', outline);
      line.setAttribute('class', 'floor');
      svg.appendChild(line);
    }
    for (const cell of buildScene(blocks, opts)) {
      for (const [face, fill] of [
        [cell.top, cell.topFill], [cell.left, cell.leftFill],
        [cell.right, cell.rightFill],
      ] as const) {
        const polygon = document.createElementNS(SVG_NS, 'polygon');
        polygon.setAttribute('points', face);
        polygon.setAttribute('fill', fill);
        polygon.setAttribute('stroke', '#1b1b1b');
        polygon.setAttribute('stroke-width', '0.5');
        svg.appendChild(polygon);
      }
    }
  }

  private notify(message: string): void {
    const notice = this.query('#notice') as HTMLElement;
    notice.textContent = message;
    notice.hidden = false;
    setTimeout(() => { notice.hidden = true; }, 4000);
  }

  private query(selector: string): Element {
    const found = this.root.querySelector(selector);
    if (!found) {
      throw new Error(`missing element ${selector}`);
    }
    return found;
  }
}
