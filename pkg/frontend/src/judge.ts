import type { ApiError } from "./api.js";
import type {
  Estimates,
  NextTask,
  PairDetail,
  Progress,
  Task,
  VerdictValue,
} from "./types.js";

/** The slice of the service API the judging flow needs. */
export interface JudgeApi {
  nextTask(): Promise<NextTask>;
  pairDetail(i: string, j: string): Promise<PairDetail>;
  postVerdict(i: string, j: string, value: VerdictValue, source?: string): Promise<unknown>;
  estimates(): Promise<Estimates>;
}

export interface JudgeState {
  task: Task | null;
  detail: PairDetail | null;
  progress: Progress | null;
  estimates: Estimates | null;
  done: boolean;
  busy: boolean;
  error: string | null;
  pendingRetries: number;
}

interface QueuedVerdict {
  i: string;
  j: string;
  value: VerdictValue;
}

/** Drives the judging loop: fetch task, show context, post verdict, advance.
 *
 * Verdicts are delivered at least once: a failed post stays in the retry
 * queue and is flushed before anything else is sent. The server dedupes
 * per (pair, source), so re-sending cannot double-count.
 */
export class JudgeController {
  state: JudgeState = {
    task: null,
    detail: null,
    progress: null,
    estimates: null,
    done: false,
    busy: false,
    error: null,
    pendingRetries: 0,
  };

  private queue: QueuedVerdict[] = [];
  private listeners: Array<(s: JudgeState) => void> = [];

  constructor(private api: JudgeApi) {}

  onChange(fn: (s: JudgeState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    this.state.pendingRetries = this.queue.length;
    for (const fn of this.listeners) fn(this.state);
  }

  async start(): Promise<void> {
    await this.refreshEstimates();
    await this.advance();
  }

  async advance(): Promise<void> {
    this.state.busy = true;
    this.emit();
    try {
      const next = await this.api.nextTask();
      this.state.progress = next.progress;
      this.state.task = next.task;
      this.state.done = next.task === null;
      this.state.detail = next.task
        ? await this.api.pairDetail(next.task.i, next.task.j)
        : null;
    } catch (err) {
      this.state.error = String(err);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Post the verdict for the current task, then advance to the next one.
   *
   * If delivery fails the task stays current (the server would re-serve it
   * anyway) and the verdict waits in the retry queue.
   */
  async submit(value: VerdictValue): Promise<void> {
    const task = this.state.task;
    if (!task || this.state.busy) return;
    this.state.error = null;
    this.queue.push({ i: task.i, j: task.j, value });
    await this.flush();
    if (this.queue.length === 0) {
      await this.advance();
      await this.refreshEstimates();
    }
  }

  /** Send every queued verdict, keeping retryable failures queued. */
  async flush(): Promise<void> {
    while (this.queue.length > 0) {
      const head = this.queue[0];
      try {
        await this.api.postVerdict(head.i, head.j, head.value);
        this.queue.shift();
        this.state.error = null;
      } catch (err) {
        const status = (err as ApiError).status;
        if (status === 409 || status === 400) {
          // the service refused the pair (unknown/self/conflict): surface
          // it and drop the verdict, retrying would never succeed
          this.state.error = String(err);
          this.queue.shift();
        } else {
          this.state.error = `verdict delivery failed, will retry: ${String(err)}`;
          break;
        }
      }
    }
    this.emit();
  }

  /** Retry queued deliveries, then move on if the queue drained. */
  async retry(): Promise<void> {
    await this.flush();
    if (this.queue.length === 0) {
      await this.advance();
      await this.refreshEstimates();
    }
  }

  async refreshEstimates(): Promise<void> {
    try {
      this.state.estimates = await this.api.estimates();
    } catch (err) {
      this.state.error = String(err);
    }
    this.emit();
  }
}
