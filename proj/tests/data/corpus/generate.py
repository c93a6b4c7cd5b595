#!/usr/bin/env python3
"""Regenerates the fixture corpus.

Expected outputs come from running each ground-truth model through
`minizinc` (path in argv[1]); optimization optima are cross-checked by brute
force here before anything is written.
"""

import itertools
import json
import pathlib
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent


def param(symbol, definition, shape=()):
    return {"definition": definition, "symbol": symbol, "shape": list(shape)}


INSTANCES = []


def instance(ident, title, domain, objective, description, params, outputs, data, model, keywords=(), brute=None):
    INSTANCES.append(dict(ident=ident, title=title, domain=domain, objective=objective, description=description,
                          params=params, outputs=outputs, data=data, model=model, keywords=list(keywords),
                          brute=brute))


# --- knapsack -----------------------------------------------------------------
KN_W = [12, 7, 11, 8, 9]
KN_V = [24, 13, 23, 15, 16]
KN_C = 26


def knapsack_brute():
    best = 0
    for pick in itertools.product([0, 1], repeat=len(KN_W)):
        if sum(w * p for w, p in zip(KN_W, pick)) <= KN_C:
            best = max(best, sum(v * p for v, p in zip(KN_V, pick)))
    return best


instance(
    "nlp4lp_knapsack", "Cargo Knapsack", "Logistics", "maximize",
    "A truck can carry at most C kilograms. There are N crates; crate i weighs Weight[i] kilograms and is worth "
    "Value[i] dollars. Choose which crates to load so that the total value is as large as possible without "
    "exceeding the capacity.",
    [param("N", "Number of crates"), param("C", "Truck capacity in kilograms"),
     param("Weight", "Weight of each crate", ["N"]), param("Value", "Value of each crate", ["N"])],
    [param("Load", "1 if the crate is loaded, 0 otherwise", ["N"])],
    f"N = {len(KN_W)};\nC = {KN_C};\nWeight = {KN_W};\nValue = {KN_V};\n",
    "int: N;\nint: C;\narray[1..N] of int: Weight;\narray[1..N] of int: Value;\n"
    "array[1..N] of var 0..1: Load;\n"
    "constraint sum(i in 1..N)(Weight[i] * Load[i]) <= C;\n"
    "solve maximize sum(i in 1..N)(Value[i] * Load[i]);\n",
    ["knapsack", "integer programming"], knapsack_brute)

# --- production (Appendix A example shape) ----------------------------------
PR_AVAIL = [20, 18]
PR_REQ = [[2, 3, 1], [1, 2, 4]]
PR_PRICE = [5, 7, 6]


def production_brute():
    best = 0
    for x in itertools.product(range(0, 21), repeat=3):
        if all(sum(PR_REQ[i][j] * x[j] for j in range(3)) <= PR_AVAIL[i] for i in range(2)):
            best = max(best, sum(PR_PRICE[j] * x[j] for j in range(3)))
    return best


instance(
    "nlp4lp_production", "Raw Material Production", "Manufacturing", "maximize",
    "A firm produces M different goods using N different raw materials. The firm has Available[i] units of raw "
    "material i. One unit of good j requires Requirements[i, j] units of raw material i and sells for Prices[j]. "
    "Goods are produced in whole units. How many units of each good should the firm produce to maximize revenue?",
    [param("M", "Number of goods"), param("N", "Number of raw materials"),
     param("Available", "Available amount of each raw material", ["N"]),
     param("Requirements", "Raw material i needed per unit of good j", ["N", "M"]),
     param("Prices", "Revenue per unit of each good", ["M"])],
    [param("UnitsProduced", "Units produced of each good", ["M"])],
    "M = 3;\nN = 2;\nAvailable = [20, 18];\nRequirements = [| 2, 3, 1 | 1, 2, 4 |];\nPrices = [5, 7, 6];\n",
    "int: M;\nint: N;\narray[1..N] of int: Available;\narray[1..N, 1..M] of int: Requirements;\n"
    "array[1..M] of int: Prices;\n"
    "array[1..M] of var 0..100: UnitsProduced;\n"
    "constraint forall(i in 1..N)(sum(j in 1..M)(Requirements[i, j] * UnitsProduced[j]) <= Available[i]);\n"
    "solve maximize sum(j in 1..M)(Prices[j] * UnitsProduced[j]);\n",
    ["production planning", "linear programming"], production_brute)

# --- transportation ------------------------------------------------------------
TR_SUP = [30, 25]
TR_DEM = [15, 20, 18]
TR_COST = [[4, 6, 9], [5, 3, 7]]


def transport_brute():
    best = None
    for a in range(0, 16):
        for b in range(0, 21):
            for c in range(0, 19):
                if a + b + c > TR_SUP[0]:
                    continue
                rest = [TR_DEM[0] - a, TR_DEM[1] - b, TR_DEM[2] - c]
                if sum(rest) > TR_SUP[1]:
                    continue
                cost = (TR_COST[0][0] * a + TR_COST[0][1] * b + TR_COST[0][2] * c
                        + sum(TR_COST[1][j] * rest[j] for j in range(3)))
                best = cost if best is None else min(best, cost)
    return best


instance(
    "complexor_transport", "Two-Plant Transportation", "Supply Chain", "minimize",
    "Two plants ship a product to three customers. Plant p can ship at most Supply[p] units and customer c needs "
    "exactly Demand[c] units. Shipping one unit from plant p to customer c costs Cost[p, c]. Find the shipment "
    "plan with the least total shipping cost.",
    [param("P", "Number of plants"), param("C", "Number of customers"),
     param("Supply", "Capacity of each plant", ["P"]), param("Demand", "Demand of each customer", ["C"]),
     param("Cost", "Unit shipping cost", ["P", "C"])],
    [param("Ship", "Units shipped from each plant to each customer", ["P", "C"])],
    "P = 2;\nC = 3;\nSupply = [30, 25];\nDemand = [15, 20, 18];\nCost = [| 4, 6, 9 | 5, 3, 7 |];\n",
    "int: P;\nint: C;\narray[1..P] of int: Supply;\narray[1..C] of int: Demand;\narray[1..P, 1..C] of int: Cost;\n"
    "array[1..P, 1..C] of var 0..100: Ship;\n"
    "constraint forall(p in 1..P)(sum(c in 1..C)(Ship[p, c]) <= Supply[p]);\n"
    "constraint forall(c in 1..C)(sum(p in 1..P)(Ship[p, c]) = Demand[c]);\n"
    "solve minimize sum(p in 1..P, c in 1..C)(Cost[p, c] * Ship[p, c]);\n",
    ["transportation", "linear programming"], transport_brute)

# --- assignment ------------------------------------------------------------------
AS_COST = [[9, 2, 7, 8], [6, 4, 3, 7], [5, 8, 1, 8], [7, 6, 9, 4]]


def assignment_brute():
    return min(sum(AS_COST[w][p[w]] for w in range(4)) for p in itertools.permutations(range(4)))


instance(
    "lpwp_assignment", "Worker Task Assignment", "Scheduling", "minimize",
    "N workers must be assigned to N tasks, one task per worker and one worker per task. Assigning worker w to "
    "task t costs Cost[w, t]. Find the assignment with minimum total cost.",
    [param("N", "Number of workers and tasks"), param("Cost", "Cost of assigning a worker to a task", ["N", "N"])],
    [param("Task", "Task given to each worker", ["N"])],
    "N = 4;\nCost = [| 9, 2, 7, 8 | 6, 4, 3, 7 | 5, 8, 1, 8 | 7, 6, 9, 4 |];\n",
    "include \"alldifferent.mzn\";\nint: N;\narray[1..N, 1..N] of int: Cost;\n"
    "array[1..N] of var 1..N: Task;\n"
    "constraint alldifferent(Task);\n"
    "solve minimize sum(w in 1..N)(Cost[w, Task[w]]);\n",
    ["assignment", "global constraints"], assignment_brute)

# --- graph colouring ---------------------------------------------------------------
GC_EDGES = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 5), (4, 6), (5, 6), (1, 6)]


def coloring_brute():
    for k in range(1, 7):
        for col in itertools.product(range(k), repeat=6):
            if all(col[a - 1] != col[b - 1] for a, b in GC_EDGES):
                return k
    return None


instance(
    "csplib_graph_coloring", "Minimum Graph Colouring", "Combinatorics", "minimize",
    "Colour the V vertices of a graph so that the two endpoints of every edge get different colours. The E edges "
    "are given as pairs Edges[e, 1], Edges[e, 2]. Use as few colours as possible.",
    [param("V", "Number of vertices"), param("E", "Number of edges"),
     param("Edges", "Endpoints of each edge", ["E", "2"])],
    [param("Colour", "Colour of each vertex", ["V"])],
    "V = 6;\nE = 9;\nEdges = [| " + " | ".join(f"{a}, {b}" for a, b in GC_EDGES) + " |];\n",
    "int: V;\nint: E;\narray[1..E, 1..2] of 1..V: Edges;\n"
    "array[1..V] of var 1..V: Colour;\n"
    "constraint forall(e in 1..E)(Colour[Edges[e, 1]] != Colour[Edges[e, 2]]);\n"
    "solve minimize max(Colour);\n",
    ["graph colouring", "constraint programming"], coloring_brute)

# --- set cover with set data ---------------------------------------------------------
SC_SETS = [{1, 2, 3}, {2, 4}, {3, 4, 5}, {5, 6}, {1, 6}, {4, 5, 6}]
SC_COST = [5, 3, 4, 2, 3, 6]


def setcover_brute():
    best = None
    for pick in itertools.product([0, 1], repeat=len(SC_SETS)):
        covered = set().union(*[s for s, p in zip(SC_SETS, pick) if p]) if any(pick) else set()
        if covered >= set(range(1, 7)):
            c = sum(cst for cst, p in zip(SC_COST, pick) if p)
            best = c if best is None else min(best, c)
    return best


def dzn_set(s):
    s = sorted(s)
    if len(s) >= 2 and s == list(range(s[0], s[-1] + 1)):
        return f"{s[0]}..{s[-1]}"
    return "{" + ", ".join(map(str, s)) + "}"


instance(
    "complexor_set_cover", "Facility Set Cover", "Facility Location", "minimize",
    "There are U districts and S candidate facilities. Facility s serves the districts in Serves[s] and costs "
    "Cost[s] to open. Open facilities so that every district is served by at least one open facility, at minimum "
    "total cost.",
    [param("U", "Number of districts"), param("S", "Number of candidate facilities"),
     param("Serves", "Districts served by each facility", ["S"]), param("Cost", "Opening cost of each facility", ["S"])],
    [param("Open", "Whether each facility is opened", ["S"])],
    "U = 6;\nS = 6;\nServes = [" + ", ".join(dzn_set(s) for s in SC_SETS) + "];\nCost = " + str(SC_COST) + ";\n",
    "int: U;\nint: S;\narray[1..S] of set of 1..U: Serves;\narray[1..S] of int: Cost;\n"
    "array[1..S] of var bool: Open;\n"
    "constraint forall(u in 1..U)(exists(s in 1..S where u in Serves[s])(Open[s]));\n"
    "solve minimize sum(s in 1..S)(Cost[s] * bool2int(Open[s]));\n",
    ["set covering", "integer programming"], setcover_brute)

# --- single machine scheduling ---------------------------------------------------------
SM_P = [3, 1, 4, 2]
SM_W = [2, 5, 1, 3]


def sched_brute():
    best = None
    for order in itertools.permutations(range(4)):
        t = 0
        total = 0
        for j in order:
            t += SM_P[j]
            total += SM_W[j] * t
        best = total if best is None else min(best, total)
    return best


instance(
    "lpwp_single_machine", "Weighted Completion Time", "Scheduling", "minimize",
    "N jobs run one at a time on a single machine without preemption. Job j takes Duration[j] hours and has "
    "weight Weight[j]. Sequence the jobs to minimize the weighted sum of completion times.",
    [param("N", "Number of jobs"), param("Duration", "Processing time of each job", ["N"]),
     param("Weight", "Weight of each job", ["N"])],
    [param("Start", "Start time of each job", ["N"])],
    "N = 4;\nDuration = [3, 1, 4, 2];\nWeight = [2, 5, 1, 3];\n",
    "include \"disjunctive.mzn\";\nint: N;\narray[1..N] of int: Duration;\narray[1..N] of int: Weight;\n"
    "array[1..N] of var 0..sum(Duration): Start;\n"
    "constraint disjunctive(Start, Duration);\n"
    "solve minimize sum(j in 1..N)(Weight[j] * (Start[j] + Duration[j]));\n",
    ["scheduling", "global constraints"], sched_brute)

# --- satisfaction instances -------------------------------------------------------------
instance(
    "csplib_nqueens", "Eight Queens", "Combinatorics", "satisfy",
    "Place N queens on an N by N chessboard so that no two queens share a row, a column or a diagonal.",
    [param("N", "Board size and number of queens")],
    [param("Queen", "Column of the queen in each row", ["N"])],
    "N = 8;\n",
    "include \"alldifferent.mzn\";\nint: N;\narray[1..N] of var 1..N: Queen;\n"
    "constraint alldifferent(Queen);\n"
    "constraint alldifferent(i in 1..N)(Queen[i] + i);\n"
    "constraint alldifferent(i in 1..N)(Queen[i] - i);\n"
    "solve satisfy;\n",
    ["n-queens", "constraint programming"])

instance(
    "csplib_send_more_money", "SEND + MORE = MONEY", "Puzzles", "satisfy",
    "Assign distinct digits to the letters S, E, N, D, M, O, R and Y so that SEND + MORE = MONEY holds as a sum "
    "of decimal numbers, with S and M not zero.",
    [],
    [param("Digits", "Digits of S, E, N, D, M, O, R, Y in that order", ["8"])],
    "",
    "include \"alldifferent.mzn\";\n"
    "array[1..8] of var 0..9: Digits;\n"
    "var 0..9: S = Digits[1]; var 0..9: E = Digits[2]; var 0..9: N = Digits[3]; var 0..9: D = Digits[4];\n"
    "var 0..9: M = Digits[5]; var 0..9: O = Digits[6]; var 0..9: R = Digits[7]; var 0..9: Y = Digits[8];\n"
    "constraint alldifferent(Digits);\n"
    "constraint S > 0 /\\ M > 0;\n"
    "constraint 1000 * S + 100 * E + 10 * N + D + 1000 * M + 100 * O + 10 * R + E\n"
    "         = 10000 * M + 1000 * O + 100 * N + 10 * E + Y;\n"
    "solve satisfy;\n",
    ["cryptarithm", "empty data"])

instance(
    "csplib_sudoku_4x4", "Shidoku", "Puzzles", "satisfy",
    "Fill the 4 by 4 grid with digits 1 to 4 so that each row, each column and each of the four 2 by 2 boxes "
    "contains every digit once. Given[r, c] holds the pre-filled digit, or 0 for an empty cell.",
    [param("Given", "Pre-filled digits, 0 for empty", ["4", "4"])],
    [param("Grid", "Completed grid", ["4", "4"])],
    "Given = [| 1, 0, 0, 0 | 0, 0, 3, 0 | 0, 4, 0, 0 | 0, 0, 0, 2 |];\n",
    "include \"alldifferent.mzn\";\narray[1..4, 1..4] of int: Given;\n"
    "array[1..4, 1..4] of var 1..4: Grid;\n"
    "constraint forall(r, c in 1..4 where Given[r, c] > 0)(Grid[r, c] = Given[r, c]);\n"
    "constraint forall(r in 1..4)(alldifferent([Grid[r, c] | c in 1..4]));\n"
    "constraint forall(c in 1..4)(alldifferent([Grid[r, c] | r in 1..4]));\n"
    "constraint forall(br, bc in 0..1)(alldifferent([Grid[2 * br + i, 2 * bc + j] | i, j in 1..2]));\n"
    "solve satisfy;\n",
    ["latin square", "constraint programming"])

instance(
    "nlp4lp_shift_cover", "Nurse Shift Cover", "Workforce", "satisfy",
    "A ward runs D days. On day d at least Need[d] of the K nurses must work. Every nurse works at most MaxDays "
    "days. Find a roster meeting these rules.",
    [param("D", "Number of days"), param("K", "Number of nurses"), param("MaxDays", "Maximum days per nurse"),
     param("Need", "Nurses needed each day", ["D"])],
    [param("Works", "1 if nurse k works on day d", ["K", "D"])],
    "D = 5;\nK = 4;\nMaxDays = 3;\nNeed = [2, 3, 2, 2, 3];\n",
    "int: D;\nint: K;\nint: MaxDays;\narray[1..D] of int: Need;\n"
    "array[1..K, 1..D] of var 0..1: Works;\n"
    "constraint forall(d in 1..D)(sum(k in 1..K)(Works[k, d]) >= Need[d]);\n"
    "constraint forall(k in 1..K)(sum(d in 1..D)(Works[k, d]) <= MaxDays);\n"
    "solve satisfy;\n",
    ["rostering"])

instance(
    "csplib_pigeonhole", "Pigeonhole", "Combinatorics", "satisfy",
    "Place P pigeons into H holes with at most one pigeon per hole.",
    [param("P", "Number of pigeons"), param("H", "Number of holes")],
    [param("Hole", "Hole of each pigeon", ["P"])],
    "P = 5;\nH = 4;\n",
    "include \"alldifferent.mzn\";\nint: P;\nint: H;\narray[1..P] of var 1..H: Hole;\n"
    "constraint alldifferent(Hole);\nsolve satisfy;\n",
    ["infeasible"])


def run_minizinc(exe, model, data):
    with tempfile.TemporaryDirectory() as tmp:
        mp = pathlib.Path(tmp, "model.mzn")
        mp.write_text(model)
        args = [exe, "--solver", "gecode", "--time-limit", "60000", "--output-mode", "json", "--output-objective",
                str(mp)]
        if data.strip():
            dp = pathlib.Path(tmp, "data.dzn")
            dp.write_text(data)
            args.append(str(dp))
        return subprocess.run(args, capture_output=True, text=True, timeout=120).stdout


def parse_json_output(text):
    blocks = text.split("----------")
    if "=====UNSATISFIABLE=====" in text:
        return None
    last = [b for b in blocks if b.strip().startswith("{")][-1]
    return json.loads(last)


def main():
    exe = sys.argv[1] if len(sys.argv) > 1 else "minizinc"
    index = []
    for inst in INSTANCES:
        d = ROOT / inst["ident"]
        d.mkdir(exist_ok=True)
        inp = {
            "description": inst["description"],
            "parameters": inst["params"],
            "output": inst["outputs"],
            "metadata": {
                "title": inst["title"],
                "identifier": inst["ident"],
                "domain": inst["domain"],
                "objective": inst["objective"],
                "keywords": inst["keywords"],
            },
            "verified": True,
        }
        (d / "input.json").write_text(json.dumps(inp, indent=2) + "\n")
        (d / "data.dzn").write_text(inst["data"])
        (d / "model.mzn").write_text(inst["model"])
        sol = parse_json_output(run_minizinc(exe, inst["model"], inst["data"]))
        out = {}
        if sol is None:
            out = {"variable_values": {}, "unsatisfiable": True}
        else:
            objective = sol.pop("_objective", None)
            sol.pop("_checker", None)
            values = {o["symbol"]: sol[o["symbol"]] for o in inst["outputs"] if o["symbol"] in sol}
            if inst["objective"] != "satisfy":
                want = inst["brute"]()
                if objective != want:
                    sys.exit(f"{inst['ident']}: solver optimum {objective} != brute force {want}")
                out["objective_value"] = objective
            out["variable_values"] = values
        (d / "output.json").write_text(json.dumps(out, indent=2) + "\n")
        index.append({"id": inst["ident"], "path": inst["ident"]})
        print(inst["ident"], out.get("objective_value", "unsat" if out.get("unsatisfiable") else "sat"))
    (ROOT / "index.json").write_text(json.dumps({"instances": index}, indent=2) + "\n")


if __name__ == "__main__":
    main()
