import { describe, expect, it } from "vitest";
import * as fs from "fs";
import * as path from "path";
import { EmptySelection, SchemaMismatch, readBerCsv, readRequiredCsv } from "../src/csv";
import { berCurves } from "../src/figure";

const FIX = path.join(__dirname, "fixtures");

describe("ber csv reader", () => {
    it("parses the fixture", () => {
        const rows = readBerCsv(fs.readFileSync(path.join(FIX, "ber.csv"), "utf8"));
        expect(rows.length).toBe(54);
        expect(rows[0].scheme).toBe("golden");
        expect(rows[0].bits_simulated).toBe(1000000);
        expect(rows[0].bit_errors).toBe(360000);
    });

    it("refuses a missing or wrong schema line", () => {
        expect(() => readBerCsv("scheme,cfo_rel\n")).toThrow(SchemaMismatch);
        expect(() => readBerCsv("# schema: other/1\nscheme\n"))
            .toThrow(SchemaMismatch);
    });

    it("refuses unexpected columns", () => {
        expect(() => readBerCsv("# schema: mimo-ofdm-ber/1\na,b\n1,2\n"))
            .toThrow(SchemaMismatch);
    });
});

describe("required csv reader", () => {
    it("parses floors as null", () => {
        const rows = readRequiredCsv(
            fs.readFileSync(path.join(FIX, "req.csv"), "utf8"));
        const floor = rows.filter((r) => r.floor);
        expect(floor.length).toBe(1);
        expect(floor[0].required_ebn0_db).toBeNull();
        expect(rows[0].required_ebn0_db).toBeCloseTo(15.8);
    });
});

describe("selection errors", () => {
    it("raises EmptySelection for an unknown scheme", () => {
        const rows = readBerCsv(fs.readFileSync(path.join(FIX, "ber.csv"), "utf8"));
        expect(() => berCurves(rows, { scheme: "vblast" }))
            .toThrow(EmptySelection);
    });
});
