use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};

/// Gate operands are wire indices: `0..inputs` are the circuit inputs and
/// wire `inputs + i` is the output of gate `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Xor(usize, usize),
    And(usize, usize),
    Const(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct BooleanCircuit {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

#[derive(Deserialize)]
struct RawCircuit {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl TryFrom<RawCircuit> for BooleanCircuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        BooleanCircuit::new(raw.inputs, raw.gates, raw.outputs)
    }
}

impl BooleanCircuit {
    pub fn new(inputs: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        for (i, g) in gates.iter().enumerate() {
            let wire = inputs + i;
            if let Gate::Xor(a, b) | Gate::And(a, b) = *g {
                if a >= wire || b >= wire {
                    return Err(malformed(format!("gate {wire} reads a later wire")));
                }
            }
        }
        if outputs.is_empty() {
            return Err(malformed("circuit has no outputs"));
        }
        let wires = inputs + gates.len();
        if let Some(o) = outputs.iter().find(|&&o| o >= wires) {
            return Err(malformed(format!("output wire {o} out of range")));
        }
        Ok(BooleanCircuit { inputs, gates, outputs })
    }

    /// Outputs are the inputs, unchanged.
    pub fn identity(arity: usize) -> Self {
        BooleanCircuit { inputs: arity, gates: Vec::new(), outputs: (0..arity).collect() }
    }

    pub fn xor() -> Self {
        BooleanCircuit { inputs: 2, gates: vec![Gate::Xor(0, 1)], outputs: vec![2] }
    }

    pub fn and() -> Self {
        BooleanCircuit { inputs: 2, gates: vec![Gate::And(0, 1)], outputs: vec![2] }
    }

    /// Sum and carry of three bits.
    pub fn full_adder() -> Self {
        let gates = vec![
            Gate::Xor(0, 1), // 3
            Gate::Xor(3, 2), // 4 sum
            Gate::And(0, 1), // 5
            Gate::And(3, 2), // 6
            Gate::Xor(5, 6), // 7 carry
        ];
        BooleanCircuit { inputs: 3, gates, outputs: vec![4, 7] }
    }

    /// Each input copied `times` times, input-major.
    pub fn duplicate(arity: usize, times: usize) -> Self {
        let outputs = (0..arity).flat_map(|i| std::iter::repeat_n(i, times)).collect();
        BooleanCircuit { inputs: arity, gates: Vec::new(), outputs }
    }

    pub fn arity(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn wire_count(&self) -> usize {
        self.inputs + self.gates.len()
    }

    pub fn eval(&self, bits: &[bool]) -> Result<Vec<bool>> {
        if bits.len() != self.inputs {
            return Err(Error::ArityMismatch { expected: self.inputs, found: bits.len() });
        }
        let mut wires = bits.to_vec();
        wires.reserve(self.gates.len());
        for g in &self.gates {
            let v = match *g {
                Gate::Xor(a, b) => wires[a] ^ wires[b],
                Gate::And(a, b) => wires[a] & wires[b],
                Gate::Const(c) => c,
            };
            wires.push(v);
        }
        Ok(self.outputs.iter().map(|&o| wires[o]).collect())
    }

    /// Bit-sliced evaluation: bit `j` of every word is one input assignment.
    pub fn eval_words(&self, words: &[u64]) -> Result<Vec<u64>> {
        if words.len() != self.inputs {
            return Err(Error::ArityMismatch { expected: self.inputs, found: words.len() });
        }
        let mut wires = words.to_vec();
        for g in &self.gates {
            let v = match *g {
                Gate::Xor(a, b) => wires[a] ^ wires[b],
                Gate::And(a, b) => wires[a] & wires[b],
                Gate::Const(c) => {
                    if c {
                        u64::MAX
                    } else {
                        0
                    }
                }
            };
            wires.push(v);
        }
        Ok(self.outputs.iter().map(|&o| wires[o]).collect())
    }

    /// Per-output truth tables as bitsets over assignments, where assignment
    /// `x` sets input `i` to bit `i` of `x`.
    pub fn truth_table(&self) -> Result<Vec<Vec<u64>>> {
        if self.inputs > 24 {
            return Err(Error::InvalidParameter("truth tables limited to 24 inputs".into()));
        }
        let rows = 1u64 << self.inputs;
        let blocks = rows.div_ceil(64) as usize;
        let mut tables = vec![vec![0u64; blocks]; self.outputs.len()];
        for block in 0..blocks {
            let words: Vec<u64> = (0..self.inputs).map(|i| input_word(i, block as u64)).collect();
            for (t, w) in tables.iter_mut().zip(self.eval_words(&words)?) {
                t[block] = w;
            }
        }
        if rows < 64 {
            let mask = (1u64 << rows) - 1;
            tables.iter_mut().for_each(|t| t[0] &= mask);
        }
        Ok(tables)
    }

    /// Longest gate path from an input or constant to an output.
    pub fn depth(&self) -> usize {
        let depths = self.wire_depths();
        self.outputs.iter().map(|&o| depths[o]).max().unwrap_or(0)
    }

    pub(crate) fn wire_depths(&self) -> Vec<usize> {
        let mut depths = vec![0usize; self.inputs];
        for g in &self.gates {
            let d = match *g {
                Gate::Xor(a, b) | Gate::And(a, b) => 1 + depths[a].max(depths[b]),
                Gate::Const(_) => 0,
            };
            depths.push(d);
        }
        depths
    }

    /// Line-oriented text form. Inputs are `x0…`, gate wires `g<index>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("inputs {}\n", self.inputs);
        let name = |w: usize| if w < self.inputs { format!("x{w}") } else { format!("g{w}") };
        for (i, g) in self.gates.iter().enumerate() {
            let w = self.inputs + i;
            let _ = match *g {
                Gate::Xor(a, b) => writeln!(out, "g{w} = XOR {} {}", name(a), name(b)),
                Gate::And(a, b) => writeln!(out, "g{w} = AND {} {}", name(a), name(b)),
                Gate::Const(c) => writeln!(out, "g{w} = CONST{}", c as u8),
            };
        }
        let outs: Vec<String> = self.outputs.iter().map(|&o| name(o)).collect();
        let _ = writeln!(out, "outputs {}", outs.join(" "));
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Also accepts `NOT a` and
    /// `OR a b`, rewritten into XOR/AND, arbitrary gate names and `#`
    /// comments.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut inputs = None;
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut gates = Vec::new();
        let mut outputs = None;
        let mut one: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |what: &str| malformed(format!("line {}: {what}", lineno + 1));
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "inputs" => {
                    let n: usize = tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("bad input count"))?;
                    if inputs.is_some() || !gates.is_empty() {
                        return Err(err("inputs must be declared once, first"));
                    }
                    for i in 0..n {
                        names.insert(format!("x{i}"), i);
                    }
                    inputs = Some(n);
                }
                "outputs" => {
                    let outs = tokens[1..]
                        .iter()
                        .map(|t| names.get(*t).copied().ok_or_else(|| err("unknown output wire")))
                        .collect::<Result<Vec<_>>>()?;
                    outputs = Some(outs);
                }
                _ => {
                    let n = inputs.ok_or_else(|| err("gate before inputs"))?;
                    if tokens.len() < 3 || tokens[1] != "=" {
                        return Err(err("expected `<name> = <OP> …`"));
                    }
                    let arg = |k: usize| -> Result<usize> {
                        let t = tokens.get(k).ok_or_else(|| err("missing operand"))?;
                        names.get(*t).copied().ok_or_else(|| err("unknown operand"))
                    };
                    let push = |g: Gate, gates: &mut Vec<Gate>| {
                        gates.push(g);
                        n + gates.len() - 1
                    };
                    let wire = match tokens[2] {
                        "XOR" => push(Gate::Xor(arg(3)?, arg(4)?), &mut gates),
                        "AND" => push(Gate::And(arg(3)?, arg(4)?), &mut gates),
                        "CONST0" => push(Gate::Const(false), &mut gates),
                        "CONST1" => push(Gate::Const(true), &mut gates),
                        "NOT" => {
                            let a = arg(3)?;
                            let c = match one {
                                Some(c) => c,
                                None => {
                                    let c = push(Gate::Const(true), &mut gates);
                                    one = Some(c);
                                    c
                                }
                            };
                            push(Gate::Xor(a, c), &mut gates)
                        }
                        "OR" => {
                            let (a, b) = (arg(3)?, arg(4)?);
                            let x = push(Gate::Xor(a, b), &mut gates);
                            let y = push(Gate::And(a, b), &mut gates);
                            push(Gate::Xor(x, y), &mut gates)
                        }
                        _ => return Err(err("unknown gate type")),
                    };
                    if names.insert(tokens[0].to_string(), wire).is_some() {
                        return Err(err("wire name reused"));
                    }
                }
            }
        }
        let inputs = inputs.ok_or_else(|| malformed("missing `inputs` line"))?;
        let outputs = outputs.ok_or_else(|| malformed("missing `outputs` line"))?;
        BooleanCircuit::new(inputs, gates, outputs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuits always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
    }

    /// Fixes the trailing `suffix.len()` inputs to constants and folds.
    pub fn partial_apply(&self, suffix: &[bool]) -> Result<BooleanCircuit> {
        if suffix.len() > self.inputs {
            return Err(Error::ArityMismatch { expected: self.inputs, found: suffix.len() });
        }
        let free = self.inputs - suffix.len();
        let mut b = CircuitBuilder::new(free);
        let mut map: Vec<usize> = (0..free).collect();
        map.extend(suffix.iter().map(|&bit| b.constant(bit)));
        let outs = b.replay(self, map);
        Ok(b.finish(&outs))
    }

    /// `self ∘ (inner₁, …, inner_k)`: every inner circuit reads the same
    /// inputs and their concatenated outputs feed `self`.
    pub fn compose(&self, inners: &[BooleanCircuit]) -> Result<BooleanCircuit> {
        let arity = inners.first().map_or(0, BooleanCircuit::arity);
        if inners.iter().any(|c| c.arity() != arity) {
            return Err(malformed("inner circuits disagree on arity"));
        }
        let fed: usize = inners.iter().map(BooleanCircuit::num_outputs).sum();
        if fed != self.inputs {
            return Err(Error::ArityMismatch { expected: self.inputs, found: fed });
        }
        let mut b = CircuitBuilder::new(arity);
        let mut mids = Vec::with_capacity(fed);
        for inner in inners {
            mids.extend(b.replay(inner, (0..arity).collect()));
        }
        let outs = b.replay(self, mids);
        Ok(b.finish(&outs))
    }

    /// Sequential composition `next ∘ self`.
    pub fn then(&self, next: &BooleanCircuit) -> Result<BooleanCircuit> {
        next.compose(std::slice::from_ref(self))
    }
}

/// Word `block` of the truth-table column for input `i`.
pub(crate) fn input_word(i: usize, block: u64) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xaaaa_aaaa_aaaa_aaaa,
        0xcccc_cccc_cccc_cccc,
        0xf0f0_f0f0_f0f0_f0f0,
        0xff00_ff00_ff00_ff00,
        0xffff_0000_ffff_0000,
        0xffff_ffff_0000_0000,
    ];
    if i < 6 {
        PATTERNS[i]
    } else if (block >> (i - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

/// Hash-consing circuit builder with constant folding.
pub struct CircuitBuilder {
    inputs: usize,
    gates: Vec<Gate>,
    konst: Vec<Option<bool>>,
    memo: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        CircuitBuilder { inputs, gates: Vec::new(), konst: vec![None; inputs], memo: HashMap::new() }
    }

    pub fn input(&self, i: usize) -> usize {
        assert!(i < self.inputs, "input {i} out of range");
        i
    }

    fn intern(&mut self, g: Gate, value: Option<bool>) -> usize {
        if let Some(&w) = self.memo.get(&g) {
            return w;
        }
        let w = self.inputs + self.gates.len();
        self.gates.push(g);
        self.konst.push(value);
        self.memo.insert(g, w);
        w
    }

    pub fn constant(&mut self, bit: bool) -> usize {
        self.intern(Gate::Const(bit), Some(bit))
    }

    pub fn constant_value(&self, w: usize) -> Option<bool> {
        self.konst[w]
    }

    pub fn xor(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return self.constant(false);
        }
        match (self.konst[a], self.konst[b]) {
            (Some(x), Some(y)) => self.constant(x ^ y),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            _ => self.intern(Gate::Xor(a.min(b), a.max(b)), None),
        }
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        match (self.konst[a], self.konst[b]) {
            (Some(false), _) | (_, Some(false)) => self.constant(false),
            (Some(true), _) => b,
            (_, Some(true)) => a,
            _ => self.intern(Gate::And(a.min(b), a.max(b)), None),
        }
    }

    pub fn not(&mut self, a: usize) -> usize {
        let one = self.constant(true);
        self.xor(a, one)
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        let x = self.xor(a, b);
        let y = self.and(a, b);
        self.xor(x, y)
    }

    /// `sel ? hi : lo`, realized as `(sel ∧ hi) ⊕ (¬sel ∧ lo)`.
    pub fn mux(&mut self, sel: usize, lo: usize, hi: usize) -> usize {
        if lo == hi {
            return lo;
        }
        match (self.konst[sel], self.konst[lo], self.konst[hi]) {
            (Some(s), _, _) => {
                if s {
                    hi
                } else {
                    lo
                }
            }
            (_, Some(false), Some(true)) => sel,
            (_, Some(true), Some(false)) => self.not(sel),
            (_, Some(false), _) => self.and(sel, hi),
            (_, _, Some(false)) => {
                let ns = self.not(sel);
                self.and(ns, lo)
            }
            _ => {
                let t = self.and(sel, hi);
                let ns = self.not(sel);
                let f = self.and(ns, lo);
                self.xor(t, f)
            }
        }
    }

    /// Re-emits `c` with its inputs bound to `inputs`; returns its outputs.
    pub fn replay(&mut self, c: &BooleanCircuit, inputs: Vec<usize>) -> Vec<usize> {
        let mut map = inputs;
        for g in c.gates() {
            let w = match *g {
                Gate::Xor(a, b) => self.xor(map[a], map[b]),
                Gate::And(a, b) => self.and(map[a], map[b]),
                Gate::Const(bit) => self.constant(bit),
            };
            map.push(w);
        }
        c.outputs().iter().map(|&o| map[o]).collect()
    }

    /// Circuit with the given outputs; gates they do not reach are dropped.
    pub fn finish(self, outputs: &[usize]) -> BooleanCircuit {
        let mut live = vec![false; self.inputs + self.gates.len()];
        for &o in outputs {
            live[o] = true;
        }
        for w in (self.inputs..live.len()).rev() {
            if live[w] {
                if let Gate::Xor(a, b) | Gate::And(a, b) = self.gates[w - self.inputs] {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        let mut remap: Vec<usize> = (0..self.inputs).collect();
        remap.resize(live.len(), usize::MAX);
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            let w = self.inputs + i;
            if !live[w] {
                continue;
            }
            remap[w] = self.inputs + gates.len();
            gates.push(match *g {
                Gate::Xor(a, b) => Gate::Xor(remap[a], remap[b]),
                Gate::And(a, b) => Gate::And(remap[a], remap[b]),
                Gate::Const(bit) => Gate::Const(bit),
            });
        }
        let outputs = outputs.iter().map(|&o| remap[o]).collect();
        BooleanCircuit { inputs: self.inputs, gates, outputs }
    }
}

/// Random circuit with `gates` gates and `outputs` outputs drawn from the
/// later half of the wires. Operands are arbitrary earlier wires (repeats
/// allowed); roughly one gate in ten is a constant.
pub fn random_circuit(arity: usize, gates: usize, outputs: usize, rng: &mut dyn RngCore) -> BooleanCircuit {
    random_circuit_with_depth(arity, gates, outputs, usize::MAX, rng)
}

/// As [`random_circuit`] with every wire at depth at most `max_depth`.
pub fn random_circuit_with_depth(
    arity: usize,
    gates: usize,
    outputs: usize,
    max_depth: usize,
    rng: &mut dyn RngCore,
) -> BooleanCircuit {
    let mut list = Vec::with_capacity(gates);
    let mut depth = vec![0usize; arity];
    for _ in 0..gates {
        let wires = arity + list.len();
        let eligible: Vec<usize> = (0..wires).filter(|&w| depth[w] < max_depth).collect();
        if wires == 0 || eligible.is_empty() || rng.gen_range(0..10) == 0 {
            list.push(Gate::Const(rng.gen()));
            depth.push(0);
            continue;
        }
        let a = eligible[rng.gen_range(0..eligible.len())];
        let b = eligible[rng.gen_range(0..eligible.len())];
        list.push(if rng.gen() { Gate::Xor(a, b) } else { Gate::And(a, b) });
        depth.push(1 + depth[a].max(depth[b]));
    }
    let wires = arity + list.len();
    let lo = if list.is_empty() { 0 } else { arity + list.len() / 2 };
    let outs = (0..outputs.max(1)).map(|_| rng.gen_range(lo..wires.max(1))).collect();
    BooleanCircuit::new(arity, list, outs).expect("generated circuits are well formed")
}
