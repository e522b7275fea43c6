// The two sockets.  Control is strict request-reply: the protocol promises
// exactly one direct reply per client frame, in order, so a FIFO of pending
// promises is the whole pairing story.  The stream reconnects by itself and
// reports its status for the banner.

import { parseServerFrame, type ServerFrame } from './protocol.js'

type WebSocketCtor = new (url: string) => WebSocket

export class ControlChannel {
  private ws: WebSocket
  private pending: Array<{ resolve: (f: ServerFrame) => void; reject: (e: Error) => void }> = []
  private opened: Promise<void>

  constructor(url: string, Socket: WebSocketCtor = WebSocket) {
    this.ws = new Socket(url)
    this.opened = new Promise((resolve, reject) => {
      this.ws.addEventListener('open', () => resolve(), { once: true })
      this.ws.addEventListener('error', () => reject(new Error('control connection failed')), { once: true })
    })
    this.ws.addEventListener('message', (ev) => {
      const next = this.pending.shift()
      if (!next) return // unsolicited frame; the protocol never sends these
      try {
        next.resolve(parseServerFrame(String((ev as MessageEvent).data)))
      } catch (e) {
        next.reject(e as Error)
      }
    })
    this.ws.addEventListener('close', () => {
      const dropped = this.pending.splice(0)
      for (const p of dropped) p.reject(new Error('control connection closed'))
    })
  }

  async request(msg: object): Promise<ServerFrame> {
    await this.opened
    return new Promise<ServerFrame>((resolve, reject) => {
      this.pending.push({ resolve, reject })
      this.ws.send(JSON.stringify(msg))
    })
  }

  close(): void {
    this.ws.close()
  }
}

export type StreamStatus = 'connecting' | 'connected' | 'reconnecting' | 'gone'

export interface StreamHandlers {
  onFrame: (frame: ServerFrame) => void
  onStatus?: (status: StreamStatus) => void
}

const BACKOFF_MS = [250, 500, 1000, 2000, 4000]

export class StreamChannel {
  private ws: WebSocket | null = null
  private attempt = 0
  private closed = false
  private timer: ReturnType<typeof setTimeout> | null = null

  constructor(
    private url: string,
    private handlers: StreamHandlers,
    private Socket: WebSocketCtor = WebSocket,
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  ) {
    this.connect()
  }

  private status(s: StreamStatus): void {
    this.handlers.onStatus?.(s)
  }

  private connect(): void {
    if (this.closed) return
    this.status(this.attempt === 0 ? 'connecting' : 'reconnecting')
    const ws = new this.Socket(this.url)
    this.ws = ws
    ws.addEventListener('open', () => {
      this.attempt = 0
      this.status('connected')
    })
    ws.addEventListener('message', (ev) => {
      let frame: ServerFrame
      try {
        frame = parseServerFrame(String((ev as MessageEvent).data))
      } catch {
        return
      }
      this.handlers.onFrame(frame)
    })
    ws.addEventListener('close', (ev) => {
      if (this.closed) return
      if ((ev as CloseEvent).code === 4404) {
        // the session is gone; retrying cannot bring it back
        this.closed = true
        this.status('gone')
        return
      }
      const wait = BACKOFF_MS[Math.min(this.attempt, BACKOFF_MS.length - 1)]!
      this.attempt += 1
      this.status('reconnecting')
      this.timer = this.schedule(() => this.connect(), wait)
    })
  }

  close(): void {
    this.closed = true
    if (this.timer !== null) clearTimeout(this.timer)
    this.ws?.close()
  }
}
