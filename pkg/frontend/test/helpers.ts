/** Test scaffolding: fixture loading and a stub service transport backed
 * by the captured payloads. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { ApiClient, FetchLike } from "../src/api.js";
import type { View } from "../src/controller.js";
import type { DecisionRecord, RiskPayload } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** In-memory stand-in for the service: serves the captured fixtures and
 * keeps mutable decision history / derived-run state like the real one. */
export class StubService {
  decisions: DecisionRecord[] = [];
  derivedPolls = 0;
  log: string[] = [];

  readonly fetchLike: FetchLike = async (url, init) => {
    this.log.push(`${init?.method ?? "GET"} ${url}`);
    const u = new URL(url, "http://stub");
    const path = u.pathname;
    if (path === "/health") return jsonResponse(200, { status: "ok" });
    if (path === "/experiments") return jsonResponse(200, fixture("experiments.json"));
    if (path === "/experiments/first-run") {
      return jsonResponse(200, {
        run_id: "first-run",
        status: "complete",
        parent: null,
        delta: {},
        n_rows: 32,
      });
    }
    if (path === "/experiments/derived-80") {
      this.derivedPolls += 1;
      const done = this.derivedPolls >= 2;
      return jsonResponse(200, {
        run_id: "derived-80",
        status: done ? "complete" : "running",
        parent: "first-run",
        delta: { "run.inventory_cap": 80 },
        n_rows: 32,
        progress: { done: done ? 32 : 16, total: 32 },
      });
    }
    if (path === "/experiments/first-run/results" || path === "/experiments/derived-80/results") {
      return jsonResponse(200, fixture("results_t4.json"));
    }
    if (path === "/experiments/first-run/risk" || path === "/experiments/derived-80/risk") {
      const actor = u.searchParams.get("actor");
      const penalties = u.searchParams.get("penalties");
      if (actor === "supplier") return jsonResponse(200, fixture("risk_supplier_t4.json"));
      if (penalties && penalties.includes("V4:5000")) {
        return jsonResponse(200, fixture("risk_customer_t4_penalized.json"));
      }
      if (penalties) {
        return jsonResponse(422, { detail: { code: "invalid_request", errors: [penalties] } });
      }
      return jsonResponse(200, fixture("risk_customer_t4.json"));
    }
    if (path.startsWith("/experiments/first-run/traces/")) {
      const scenario = decodeURIComponent(path.split("/").pop() ?? "");
      if (scenario === "T1-Max-V1-S2" || scenario === "T1-Max-V4-S2") {
        return new Response(fixtureText(`trace_${scenario}.jsonl`), { status: 200 });
      }
      return jsonResponse(404, { detail: { code: "trace_not_found" } });
    }
    if (path === "/whatif" && init?.method === "POST") {
      const body = JSON.parse(String(init.body)) as { inventory_cap?: number };
      if (body.inventory_cap !== undefined) {
        if (body.inventory_cap < 0) {
          return jsonResponse(422, { detail: { code: "invalid_request", errors: ["cap"] } });
        }
        return jsonResponse(200, { experiment: "derived-80", status: "running", parent: "first-run" });
      }
      return jsonResponse(200, {
        experiment: null,
        base: "first-run",
        supplier: fixture<RiskPayload>("risk_supplier_t4.json"),
        customer: fixture<RiskPayload>("risk_customer_t4_penalized.json"),
      });
    }
    if (path === "/experiments/first-run/decision" || path === "/experiments/derived-80/decision") {
      if (init?.method === "POST") {
        const body = JSON.parse(String(init.body)) as {
          supplier_strategy: string;
          visibility: string;
          author?: string;
        };
        if (!/^S[12]$/.test(body.supplier_strategy) || !/^V[1-4]$/.test(body.visibility)) {
          return jsonResponse(422, { detail: { code: "invalid_request", errors: ["labels"] } });
        }
        const record: DecisionRecord = {
          supplier_strategy: body.supplier_strategy,
          visibility: body.visibility,
          author: body.author ?? "anonymous",
          recorded_at: 1700000000 + this.decisions.length,
        };
        this.decisions.push(record);
        return jsonResponse(200, record);
      }
      return jsonResponse(200, { decisions: this.decisions });
    }
    return jsonResponse(404, { detail: { code: "experiment_not_found" } });
  };

  client(): ApiClient {
    return new ApiClient("", this.fetchLike);
  }
}

/** View double that records the latest fragment per region. */
export class MemoryView implements View {
  html = new Map<string, string>();
  text = new Map<string, string>();
  urls: string[] = [];

  setHtml(region: string, html: string): void {
    this.html.set(region, html);
  }
  setText(region: string, text: string): void {
    this.text.set(region, text);
  }
  updateUrl(query: string): void {
    this.urls.push(query);
  }
}
