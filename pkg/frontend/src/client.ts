/**
 * Reconnecting protocol client. All wire events funnel through the view
 * model reducer; on reconnect the client re-opens with the last cursor
 * so the chart never gains duplicate points.
 */

import * as net from "node:net";

import {
  ClientMessage,
  encodeClientMessage,
  parseServiceMessage,
} from "./protocol";
import {
  SessionViewModel,
  applyMessage,
  initialViewModel,
  validateRatings,
} from "./viewmodel";

export interface DashboardOptions {
  host: string;
  port: number;
  subjectId: string;
  materialId: string;
  modelId: string;
  acclimationS?: number;
  /** initial reconnect delay; doubles up to maxBackoffMs */
  backoffMs?: number;
  maxBackoffMs?: number;
  onChange?: (view: SessionViewModel) => void;
}

export class DashboardClient {
  view: SessionViewModel = initialViewModel();

  private socket: net.Socket | null = null;
  private buffer = "";
  private stopped = false;
  private closing = false;
  private retryTimer: NodeJS.Timeout | null = null;
  private currentBackoff: number;

  constructor(private readonly options: DashboardOptions) {
    this.currentBackoff = options.backoffMs ?? 200;
  }

  /** Open the connection (and the session on first connect). */
  connect(): void {
    this.stopped = false;
    this.dial();
  }

  private dial(): void {
    const socket = net.createConnection({
      host: this.options.host,
      port: this.options.port,
    });
    this.socket = socket;
    socket.setEncoding("utf8");

    socket.on("connect", () => {
      this.currentBackoff = this.options.backoffMs ?? 200;
      if (this.view.sessionId === null) {
        this.send({
          type: "open",
          subject_id: this.options.subjectId,
          material_id: this.options.materialId,
          model_id: this.options.modelId,
          acclimation_s: this.options.acclimationS ?? 120,
        });
      } else {
        // resume: redeliver everything after the last charted window
        this.send({
          type: "open",
          session_id: this.view.sessionId,
          cursor: this.view.lastCursor,
        });
      }
    });

    socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let newline: number;
      while ((newline = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, newline);
        this.buffer = this.buffer.slice(newline + 1);
        if (line.trim().length > 0) {
          this.update(applyMessage(this.view, parseServiceMessage(line)));
        }
      }
    });

    const onGone = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      this.buffer = "";
      if (this.stopped || this.closing || this.view.phase === "closed") {
        this.update({ ...this.view, connection: "closed" });
        return;
      }
      // visible error state within one backoff period, then retry
      this.update({
        ...this.view,
        connection: "retrying",
        errorBanner:
          this.view.errorBanner ??
          `connection lost; retrying in ${this.currentBackoff} ms`,
      });
      this.retryTimer = setTimeout(() => {
        this.retryTimer = null;
        this.currentBackoff = Math.min(
          this.currentBackoff * 2,
          this.options.maxBackoffMs ?? 5000,
        );
        if (!this.stopped) this.dial();
      }, this.currentBackoff);
    };
    socket.on("error", onGone);
    socket.on("close", onGone);
  }

  private update(view: SessionViewModel): void {
    this.view = view;
    this.options.onChange?.(view);
  }

  private send(message: ClientMessage): void {
    this.socket?.write(encodeClientMessage(message));
  }

  /**
   * Validate and submit the rating form; sends the close message with
   * the trim flag. Returns the validation result; invalid ratings are
   * blocked before anything reaches the wire.
   */
  submitRatings(
    self: number,
    observers: number[],
    trim: boolean,
  ): ReturnType<typeof validateRatings> {
    const verdict = validateRatings(self, observers);
    if (!verdict.ok || this.view.sessionId === null) {
      return verdict.ok
        ? { ok: false, field: "self", message: "no open session" }
        : verdict;
    }
    this.update({
      ...this.view,
      ratingForm: { self, observers: [...observers] },
    });
    this.closing = true;
    this.send({
      type: "close",
      session_id: this.view.sessionId,
      self_rating: self,
      observer_ratings: observers,
      trim,
    });
    return verdict;
  }

  /** Wait until the predicate holds on the view model (test helper). */
  async waitFor(
    predicate: (view: SessionViewModel) => boolean,
    timeoutMs = 5000,
  ): Promise<SessionViewModel> {
    const start = Date.now();
    while (!predicate(this.view)) {
      if (Date.now() - start > timeoutMs) {
        throw new Error("timed out waiting for view state");
      }
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
    return this.view;
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.socket?.destroy();
    this.socket = null;
  }
}
