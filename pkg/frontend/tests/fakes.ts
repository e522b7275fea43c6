// Test doubles for the socket layer.  FakeSocket records outgoing frames
// and lets a test fire the browser events by hand.

type Listener = (ev: unknown) => void

export class FakeSocket {
  static instances: FakeSocket[] = []

  readonly url: string
  readonly sent: string[] = []
  closed = false
  private listeners = new Map<string, Array<{ fn: Listener; once: boolean }>>()

  constructor(url: string) {
    this.url = url
    FakeSocket.instances.push(this)
  }

  static reset(): void {
    FakeSocket.instances = []
  }

  static last(): FakeSocket {
    const s = FakeSocket.instances[FakeSocket.instances.length - 1]
    if (!s) throw new Error('no sockets created yet')
    return s
  }

  addEventListener(type: string, fn: Listener, opts?: { once?: boolean }): void {
    const list = this.listeners.get(type) ?? []
    list.push({ fn, once: opts?.once ?? false })
    this.listeners.set(type, list)
  }

  send(data: string): void {
    this.sent.push(String(data))
  }

  close(): void {
    this.closed = true
    this.emit('close', { code: 1000 })
  }

  emit(type: string, ev: unknown): void {
    const list = this.listeners.get(type) ?? []
    this.listeners.set(
      type,
      list.filter((l) => !l.once),
    )
    for (const l of list) l.fn(ev)
  }

  open(): void {
    this.emit('open', {})
  }

  message(data: string): void {
    this.emit('message', { data })
  }

  dropConnection(code = 1006): void {
    this.emit('close', { code })
  }
}

/** Captures schedule() calls so a test can run the backoff timer by hand. */
export class FakeTimer {
  readonly queue: Array<{ fn: () => void; ms: number }> = []

  schedule = (fn: () => void, ms: number): ReturnType<typeof setTimeout> => {
    this.queue.push({ fn, ms })
    return 0 as unknown as ReturnType<typeof setTimeout>
  }

  runNext(): number {
    const item = this.queue.shift()
    if (!item) throw new Error('nothing scheduled')
    item.fn()
    return item.ms
  }
}

/** Resolve promises queued by code under test. */
export async function settle(rounds = 5): Promise<void> {
  for (let i = 0; i < rounds; i++) await Promise.resolve()
}
