// Queue state machine. The server queue is peek-until-labeled, so the
// client keeps a short page buffer: submitting advances the display
// immediately from the buffer while the POST is in flight, and every ack
// re-syncs against the server. A failed POST rolls the item back, so no
// keystroke can lose state.

import type { Label, TriageItem, TriageApi } from './api.js';
import { ConflictError, IllegalLabelError } from './api.js';

const BUFFER_SIZE = 8;

export type Phase = 'loading' | 'labeling' | 'empty' | 'error';

export interface Notice {
  kind: 'conflict' | 'illegal' | 'retry';
  text: string;
}

export interface Progress {
  confirmed: number;
  rejected: number;
  pending: number;
}

export interface QueueState {
  phase: Phase;
  current: TriageItem | null;
  progress: Progress;
  notice: Notice | null;
  busy: boolean;
}

export class QueueController {
  private buffer: TriageItem[] = [];
  private state: QueueState = {
    phase: 'loading',
    current: null,
    progress: { confirmed: 0, rejected: 0, pending: 0 },
    notice: null,
    busy: false,
  };

  constructor(
    private readonly api: TriageApi,
    readonly annotator: string,
    private readonly onChange: (state: QueueState) => void,
  ) {}

  snapshot(): QueueState {
    return {
      ...this.state,
      progress: { ...this.state.progress },
    };
  }

  private emit(patch: Partial<QueueState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.snapshot());
  }

  async start(): Promise<void> {
    await this.refresh();
  }

  async refresh(): Promise<void> {
    try {
      const page = await this.api.page(0, BUFFER_SIZE);
      this.buffer = page.items.slice();
      this.emit({
        phase: this.buffer.length ? 'labeling' : 'empty',
        current: this.buffer[0] ?? null,
        progress: { ...this.state.progress, pending: page.total },
        busy: false,
      });
    } catch (err) {
      this.emit({
        phase: 'error',
        notice: { kind: 'retry', text: `cannot reach server: ${String(err)}` },
        busy: false,
      });
    }
  }

  async submit(label: Label): Promise<void> {
    const item = this.state.current;
    if (!item || this.state.busy) return;

    // optimistic advance: show the next buffered item right away
    this.buffer = this.buffer.filter((it) => it.address !== item.address);
    this.emit({
      current: this.buffer[0] ?? null,
      phase: this.buffer.length ? 'labeling' : 'loading',
      notice: null,
      busy: true,
    });

    try {
      const ack = await this.api.submitLabel(item.address, label, this.annotator);
      const progress = { ...this.state.progress, pending: ack.pending };
      if (ack.record.label === 'burn') progress.confirmed += 1;
      else progress.rejected += 1;
      this.emit({ progress, busy: false });
      if (this.buffer.length < 2) await this.refresh();
      else this.emit({ phase: 'labeling' });
    } catch (err) {
      if (err instanceof ConflictError) {
        // someone else labeled it first; the advance stands, just resync
        this.emit({
          notice: { kind: 'conflict', text: `${item.address}: ${err.message}` },
          busy: false,
        });
        await this.refresh();
        return;
      }
      // anything else: put the item back so nothing is lost
      this.buffer.unshift(item);
      const notice: Notice =
        err instanceof IllegalLabelError
          ? { kind: 'illegal', text: err.message }
          : { kind: 'retry', text: `label not saved: ${String(err)}` };
      this.emit({ phase: 'labeling', current: item, notice, busy: false });
    }
  }

  dismissNotice(): void {
    this.emit({ notice: null });
  }
}
