// Exact Givens-decomposition search over the field Q(sqrt2, sqrt3).
//
// Reduces the exact 10x6 solution isometry (entries num/den over basis
// (1, sqrt2, sqrt3, sqrt6)) to the trivial form (one +-den entry per column,
// in the input rows) using inverse beam-splitter rotations with transmission
// in {1/2, 1/4, 2/3}, optional row swaps (MZI swaps costing 2 depth and one
// pi shifter), a plateau budget for non-decreasing moves, and a bipartite
// (mod-2 quarter-turn phase) feasibility constraint tracked incrementally.
//
// Usage: rsearch <plat> <pis> <depth> <v_exact.txt> <out.jsonl> [max_solutions]

use std::collections::HashMap;
use std::env;
use std::fs;
use std::io::Write;

const NROW: usize = 10;
const NCOL: usize = 6;
const NC: usize = 4; // coefficients over (1, sqrt2, sqrt3, sqrt6)
const INPUT_ROWS: [usize; 6] = [0, 2, 3, 5, 7, 8];

type Row = [i64; NCOL * NC]; // 6 field elements of 4 ints each

#[derive(Clone)]
struct Mat {
    rows: [Row; NROW],
    den: i64,
}

// Multiplication matrix of a field element (a + b√2 + c√3 + d√6) acting on
// coefficient vectors: new = M . old.
fn mulmat(c: [i64; 4]) -> [[i64; 4]; 4] {
    let (a, b, cc, d) = (c[0], c[1], c[2], c[3]);
    [
        [a, 2 * b, 3 * cc, 6 * d],
        [b, a, 3 * d, 3 * cc],
        [cc, 2 * d, a, 2 * b],
        [d, cc, b, a],
    ]
}

// (cos, sin) of the allowed rotations, scaled by 6 (denominator 6).
const ANGLE_NAMES: [&str; 3] = ["1/2", "1/4", "2/3"];
fn angle_coefs() -> [([i64; 4], [i64; 4]); 3] {
    [
        ([0, 3, 0, 0], [0, 3, 0, 0]), // T = 1/2: c = s = sqrt2/2 (x6 = 3 sqrt2)
        ([3, 0, 0, 0], [0, 0, 3, 0]), // T = 1/4: c = 1/2, s = sqrt3/2
        ([0, 0, 0, 2], [0, 0, 2, 0]), // T = 2/3: c = sqrt6/3, s = sqrt3/3
    ]
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Mat {
    fn normalize(&mut self) {
        let mut g = self.den.abs();
        for r in &self.rows {
            for &x in r {
                if x != 0 {
                    g = gcd(g, x);
                    if g == 1 {
                        return;
                    }
                }
            }
        }
        if g > 1 {
            for r in &mut self.rows {
                for x in r.iter_mut() {
                    *x /= g;
                }
            }
            self.den /= g;
        }
    }

    fn row_nonzero(&self, i: usize) -> bool {
        self.rows[i].iter().any(|&x| x != 0)
    }

    fn nnz(&self) -> u32 {
        let mut n = 0;
        for r in &self.rows {
            for c in 0..NCOL {
                if r[c * NC..(c + 1) * NC].iter().any(|&x| x != 0) {
                    n += 1;
                }
            }
        }
        n
    }

    // New contents of rows i and j after the rotation, at denominator den*6.
    fn rotated_rows(&self, i: usize, j: usize, mc: &[[i64; 4]; 4], ms: &[[i64; 4]; 4], ori: i64) -> (Row, Row) {
        let mut ri: Row = [0; NCOL * NC];
        let mut rj: Row = [0; NCOL * NC];
        for c in 0..NCOL {
            let a = &self.rows[i][c * NC..(c + 1) * NC];
            let b = &self.rows[j][c * NC..(c + 1) * NC];
            for k in 0..NC {
                let mut vi = 0i64;
                let mut vj = 0i64;
                for l in 0..NC {
                    vi += mc[k][l] * a[l] + ori * ms[k][l] * b[l];
                    vj += mc[k][l] * b[l] - ori * ms[k][l] * a[l];
                }
                ri[c * NC + k] = vi;
                rj[c * NC + k] = vj;
            }
        }
        (ri, rj)
    }

    // Materialize the child matrix given precomputed rotated rows.
    fn with_rows(&self, i: usize, j: usize, ri: &Row, rj: &Row) -> Mat {
        let mut out = self.clone();
        for r in 0..NROW {
            if r != i && r != j {
                for x in out.rows[r].iter_mut() {
                    *x *= 6;
                }
            }
        }
        out.rows[i] = *ri;
        out.rows[j] = *rj;
        out.den = self.den * 6;
        out.normalize();
        out
    }

    fn is_goal(&self) -> bool {
        let mut used = [false; NROW];
        for c in 0..NCOL {
            let mut hit: Option<usize> = None;
            for r in 0..NROW {
                let e = &self.rows[r][c * NC..(c + 1) * NC];
                if e.iter().any(|&x| x != 0) {
                    if hit.is_some() {
                        return false;
                    }
                    if e[0].abs() != self.den || e[1] != 0 || e[2] != 0 || e[3] != 0 {
                        return false;
                    }
                    hit = Some(r);
                }
            }
            match hit {
                None => return false,
                Some(r) => {
                    if used[r] {
                        return false;
                    }
                    used[r] = true;
                }
            }
        }
        INPUT_ROWS.iter().all(|&r| used[r])
    }
}

// --- parity DSU over static phase variables (mod-2 quarter turns) -------------

#[derive(Clone, Copy)]
struct Dsu {
    parent: [u8; NROW],
    par: [u8; NROW], // parity to parent
}

impl Dsu {
    fn new() -> Dsu {
        let mut parent = [0u8; NROW];
        for (k, p) in parent.iter_mut().enumerate() {
            *p = k as u8;
        }
        Dsu { parent, par: [0; NROW] }
    }

    fn find(&self, mut x: usize) -> (usize, u8) {
        let mut p = 0u8;
        while self.parent[x] as usize != x {
            p ^= self.par[x];
            x = self.parent[x] as usize;
        }
        (x, p)
    }

    // require parity(a) ^ parity(b) == req
    fn union_req(&self, a: usize, b: usize, req: u8) -> Option<Dsu> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if (pa ^ pb) == req {
                return Some(*self);
            }
            return None;
        }
        let mut out = *self;
        out.parent[rb] = ra as u8;
        out.par[rb] = pa ^ pb ^ req;
        Some(out)
    }
}

// --- hashing -------------------------------------------------------------------

fn fnv(h: &mut u64, x: u64) {
    *h ^= x;
    *h = h.wrapping_mul(0x100000001b3);
}

fn hash_state(m: &Mat, dsu: &Dsu, var: &[u8; NROW], off: &[u8; NROW], plat: u8, pis: u8) -> u128 {
    // canonicalize columns: sign-fix by first nonzero, then sort
    let mut cols: [[i64; NROW * NC]; NCOL] = [[0; NROW * NC]; NCOL];
    for c in 0..NCOL {
        for r in 0..NROW {
            for k in 0..NC {
                cols[c][r * NC + k] = m.rows[r][c * NC + k];
            }
        }
        if let Some(&first) = cols[c].iter().find(|&&x| x != 0) {
            if first < 0 {
                for x in cols[c].iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
    cols.sort_unstable();

    // parity signature: per row (canonical component id, effective parity)
    let mut remap: [i8; NROW] = [-1; NROW];
    let mut next = 0i8;
    let mut sig: [u8; NROW] = [0; NROW];
    for r in 0..NROW {
        let (root, p) = dsu.find(var[r] as usize);
        if remap[root] < 0 {
            remap[root] = next;
            next += 1;
        }
        sig[r] = ((remap[root] as u8) << 1) | (p ^ off[r]);
    }

    let mut h1: u64 = 0xcbf29ce484222325;
    let mut h2: u64 = 0x9e3779b97f4a7c15;
    fnv(&mut h1, m.den as u64);
    fnv(&mut h2, (m.den as u64).rotate_left(17));
    for col in &cols {
        for &x in col {
            fnv(&mut h1, x as u64);
            fnv(&mut h2, (x as u64).rotate_left(31) ^ 0xdeadbeef);
        }
    }
    for &s in &sig {
        fnv(&mut h1, s as u64 ^ 0xabcd);
        fnv(&mut h2, (s as u64) << 7);
    }
    fnv(&mut h1, ((plat as u64) << 8) | pis as u64);
    fnv(&mut h2, ((pis as u64) << 8) | plat as u64);
    ((h1 as u128) << 64) | h2 as u128
}

// --- search ----------------------------------------------------------------------

struct Ctx {
    muls: [([[i64; 4]; 4], [[i64; 4]; 4]); 3],
    seen: HashMap<u128, u8>,
    memo_cap: usize,
    nodes: u64,
    solutions: Vec<Vec<(usize, usize, String, i64)>>,
    max_solutions: usize,
    out: fs::File,
}

#[allow(clippy::too_many_arguments)]
fn search(
    ctx: &mut Ctx,
    m: &Mat,
    depth: u8,
    path: &mut Vec<(usize, usize, usize, i64)>, // (i, j, angle idx or 3=swap, ori)
    dsu: &Dsu,
    var: &[u8; NROW],
    off: &[u8; NROW],
    plat: u8,
    pis: u8,
) -> bool {
    ctx.nodes += 1;
    if ctx.nodes % 10_000_000 == 0 {
        println!("nodes {} (memo {}, sols {})", ctx.nodes, ctx.seen.len(), ctx.solutions.len());
    }
    let n = m.nnz();
    if n == 6 && m.is_goal() {
        record_solution(ctx, path);
        return ctx.solutions.len() >= ctx.max_solutions;
    }
    if depth == 0 || (n as i64 - 6) > depth as i64 * 6 {
        return false;
    }
    let key = hash_state(m, dsu, var, off, plat, pis);
    if let Some(&d) = ctx.seen.get(&key) {
        if d >= depth {
            return false;
        }
    }
    if ctx.seen.len() < ctx.memo_cap {
        ctx.seen.insert(key, depth);
    }

    let nnz2 = |ra: &Row, rb: &Row| -> i32 {
        let mut k = 0;
        for c in 0..NCOL {
            if ra[c * NC..(c + 1) * NC].iter().any(|&x| x != 0) {
                k += 1;
            }
            if rb[c * NC..(c + 1) * NC].iter().any(|&x| x != 0) {
                k += 1;
            }
        }
        k
    };
    let mut moves: Vec<(i32, usize, usize, usize, i64, Row, Row, Dsu)> = Vec::new();
    for i in 0..NROW {
        for j in (i + 1)..NROW {
            let nz_i = m.row_nonzero(i);
            let nz_j = m.row_nonzero(j);
            if !nz_i && !nz_j {
                continue;
            }
            let req = 1 ^ off[i] ^ off[j];
            let ndsu = match dsu.union_req(var[i] as usize, var[j] as usize, req) {
                Some(d) => d,
                None => continue,
            };
            let before = nnz2(&m.rows[i], &m.rows[j]);
            for a in 0..3 {
                let (mc, ms) = ctx.muls[a];
                for &ori in &[1i64, -1i64] {
                    let (ri, rj) = m.rotated_rows(i, j, &mc, &ms, ori);
                    let dn = nnz2(&ri, &rj) - before;
                    if dn < 0 || (dn <= 0 && plat > 0) {
                        moves.push((dn, i, j, a, ori, ri, rj, ndsu));
                    }
                }
            }
        }
    }
    moves.sort_by_key(|t| t.0);
    for (dn, i, j, a, ori, ri, rj, ndsu) in moves {
        let new = m.with_rows(i, j, &ri, &rj);
        path.push((i, j, a, ori));
        let nplat = if dn >= 0 { plat - 1 } else { plat };
        let stop = search(ctx, &new, depth - 1, path, &ndsu, var, off, nplat, pis);
        path.pop();
        if stop {
            return true;
        }
    }
    if pis > 0 && depth >= 2 {
        for i in 0..NROW {
            for j in (i + 1)..NROW {
                if !m.row_nonzero(i) && !m.row_nonzero(j) {
                    continue;
                }
                let mut new = m.clone();
                new.rows.swap(i, j);
                let mut nvar = *var;
                let mut noff = *off;
                nvar.swap(i, j);
                noff[i] = off[j] ^ 1;
                noff[j] = off[i] ^ 1;
                path.push((i, j, 3, 1));
                let stop = search(ctx, &new, depth - 2, path, dsu, &nvar, &noff, plat, pis - 1);
                path.pop();
                if stop {
                    return true;
                }
            }
        }
    }
    false
}

fn record_solution(ctx: &mut Ctx, path: &[(usize, usize, usize, i64)]) {
    let pretty: Vec<(usize, usize, String, i64)> = path
        .iter()
        .map(|&(i, j, a, o)| {
            let name = if a == 3 { "swap".to_string() } else { ANGLE_NAMES[a].to_string() };
            (i, j, name, o)
        })
        .collect();
    let mut line = String::from("[");
    for (k, (i, j, name, o)) in pretty.iter().enumerate() {
        if k > 0 {
            line.push(',');
        }
        line.push_str(&format!("[{},{},\"{}\",{}]", i, j, name, o));
    }
    line.push(']');
    writeln!(ctx.out, "{}", line).unwrap();
    ctx.out.flush().unwrap();
    println!("solution #{}: {}", ctx.solutions.len() + 1, line);
    ctx.solutions.push(pretty);
}

fn main() {
    let args: Vec<String> = env::args().collect();
    let plat: u8 = args[1].parse().unwrap();
    let pis: u8 = args[2].parse().unwrap();
    let depth: u8 = args[3].parse().unwrap();
    let vpath = &args[4];
    let outpath = &args[5];
    let max_solutions: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(100_000);

    let text = fs::read_to_string(vpath).unwrap();
    let mut it = text.split_whitespace().map(|t| t.parse::<i64>().unwrap());
    let den = it.next().unwrap();
    let mut rows = [[0i64; NCOL * NC]; NROW];
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            *x = it.next().unwrap();
        }
    }
    let m = Mat { rows, den };
    println!("loaded den {} nnz {}", m.den, m.nnz());

    let mut ctx = Ctx {
        muls: {
            let ac = angle_coefs();
            [
                (mulmat(ac[0].0), mulmat(ac[0].1)),
                (mulmat(ac[1].0), mulmat(ac[1].1)),
                (mulmat(ac[2].0), mulmat(ac[2].1)),
            ]
        },
        seen: HashMap::new(),
        memo_cap: 50_000_000,
        nodes: 0,
        solutions: Vec::new(),
        max_solutions,
        out: fs::File::create(outpath).unwrap(),
    };

    let dsu = Dsu::new();
    let mut var = [0u8; NROW];
    for (k, v) in var.iter_mut().enumerate() {
        *v = k as u8;
    }
    let off = [0u8; NROW];
    println!("search depth {} plat {} pis {}", depth, plat, pis);
    let mut path = Vec::new();
    search(&mut ctx, &m, depth, &mut path, &dsu, &var, &off, plat, pis);
    println!(
        "done: nodes {} solutions {} memo {}",
        ctx.nodes,
        ctx.solutions.len(),
        ctx.seen.len()
    );
}
