import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";

const fixture = (name: string) => join(__dirname, "fixtures", name);

function tmpFile(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "plots-")), name);
}

describe("plot CLI", () => {
  it("renders a kl_rate figure end to end", () => {
    const out = tmpFile("fig.svg");
    const code = main(["--kind", "kl_rate", "--in", fixture("klrate-b1.csv"), "--out", out]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("is idempotent: re-rendering produces identical bytes", () => {
    const out1 = tmpFile("a.svg");
    const out2 = tmpFile("b.svg");
    main(["--kind", "compare", "--in", fixture("compare-a1b4.csv"), "--out", out1]);
    main(["--kind", "compare", "--in", fixture("compare-a1b4.csv"), "--out", out2]);
    expect(readFileSync(out1, "utf8")).toBe(readFileSync(out2, "utf8"));
  });

  it("empty CSV: error, and no file written", () => {
    const empty = tmpFile("empty.csv");
    writeFileSync(empty, "");
    const out = tmpFile("fig.svg");
    const code = main(["--kind", "kl_rate", "--in", empty, "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("missing flags: usage error", () => {
    expect(main(["--kind", "kl_rate"])).toBe(2);
  });

  it("unknown flag: usage error", () => {
    expect(main(["--pie", "1"])).toBe(2);
  });

  it("nonexistent input: error without writing", () => {
    const out = tmpFile("fig.svg");
    const code = main(["--kind", "kl_rate", "--in", "/nope.csv", "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
  });
});
