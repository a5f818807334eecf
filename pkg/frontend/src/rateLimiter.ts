// Per-key trailing coalescer: the first send in a window goes out
// immediately, later ones overwrite a pending slot that flushes when the
// window closes. Guarantees at most maxPerSecond sends per key.

export class RateLimiter<T> {
  private readonly intervalMs: number;
  private lastSent = new Map<string, number>();
  private pending = new Map<string, T>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();

  constructor(
    private readonly sink: (key: string, value: T) => void,
    maxPerSecond = 30,
    private readonly now: () => number = () => Date.now(),
  ) {
    this.intervalMs = 1000 / maxPerSecond;
  }

  push(key: string, value: T): void {
    const t = this.now();
    const last = this.lastSent.get(key);
    if (last === undefined || t - last >= this.intervalMs) {
      this.lastSent.set(key, t);
      this.sink(key, value);
      return;
    }
    this.pending.set(key, value);
    if (!this.timers.has(key)) {
      const delay = this.intervalMs - (t - last);
      this.timers.set(
        key,
        setTimeout(() => this.flush(key), delay),
      );
    }
  }

  private flush(key: string): void {
    this.timers.delete(key);
    const value = this.pending.get(key);
    if (value === undefined) return;
    this.pending.delete(key);
    this.lastSent.set(key, this.now());
    this.sink(key, value);
  }

  /** Drop anything queued (used when the connection goes away). */
  clear(): void {
    for (const timer of this.timers.values()) clearTimeout(timer);
    this.timers.clear();
    this.pending.clear();
  }
}
