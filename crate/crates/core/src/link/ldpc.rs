use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Column weight of the information part.
const INFO_DEGREE: usize = 3;
const SEED_TAG: u64 = 0x1D9C;
/// Normalization of min-sum check messages.
const MIN_SUM_SCALE: f64 = 0.75;

/// Systematic irregular repeat-accumulate LDPC code.
///
/// Codewords are `[info | parity]`. Every information bit joins
/// `min(3, n - k)` checks chosen pseudo-randomly (deterministically from
/// `(n, k)`) with balanced check degrees; the parity part is dual-diagonal,
/// so encoding is a running XOR.
#[derive(Clone, Debug)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    check_start: Vec<usize>,
    check_vars: Vec<u32>,
    info_checks: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutput {
    /// Hard decisions on the information bits.
    pub info: Vec<u8>,
    pub iterations: usize,
    /// True when the hard decisions satisfy every parity check.
    pub syndrome_ok: bool,
}

fn assign_checks(k: usize, m: usize, seed: u64) -> Vec<Vec<u32>> {
    let dv = INFO_DEGREE.min(m);
    let mut sockets: Vec<u32> = (0..k * dv).map(|s| (s % m) as u32).collect();
    let mut r = rng::stream(seed, &[]);
    sockets.shuffle(&mut r);
    // repair repeated checks within one bit by swapping with another bit's socket
    let has_dup = |s: &[u32], bit: usize| {
        let c = &s[bit * dv..(bit + 1) * dv];
        (0..dv).any(|i| c[i + 1..].contains(&c[i]))
    };
    for bit in 0..k {
        let mut tries = 0;
        while has_dup(&sockets, bit) && tries < 10_000 {
            let i = bit * dv + r.random_range(0..dv);
            let j = r.random_range(0..sockets.len());
            sockets.swap(i, j);
            if has_dup(&sockets, j / dv) && j / dv != bit {
                sockets.swap(i, j);
            }
            tries += 1;
        }
    }
    sockets.chunks(dv).map(|c| c.to_vec()).collect()
}

impl LdpcCode {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::Config(format!("no code with n = {n}, k = {k}")));
        }
        let m = n - k;
        let info_checks = assign_checks(k, m, rng::derive_seed(SEED_TAG, &[n as u64, k as u64]));
        let mut per_check: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (bit, checks) in info_checks.iter().enumerate() {
            for &c in checks {
                per_check[c as usize].push(bit as u32);
            }
        }
        for (j, vars) in per_check.iter_mut().enumerate() {
            if j > 0 {
                vars.push((k + j - 1) as u32);
            }
            vars.push((k + j) as u32);
        }
        let mut check_start = Vec::with_capacity(m + 1);
        let mut check_vars = Vec::new();
        check_start.push(0);
        for vars in &per_check {
            check_vars.extend_from_slice(vars);
            check_start.push(check_vars.len());
        }
        Ok(Self { n, k, check_start, check_vars, info_checks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k {
            return Err(Error::Dimension(format!("code takes {} bits, got {}", self.k, info.len())));
        }
        let m = self.n - self.k;
        let mut s = vec![0u8; m];
        for (bit, checks) in info.iter().zip(&self.info_checks) {
            if bit & 1 == 1 {
                for &c in checks {
                    s[c as usize] ^= 1;
                }
            }
        }
        let mut cw = Vec::with_capacity(self.n);
        cw.extend(info.iter().map(|b| b & 1));
        let mut p = 0u8;
        for sj in s {
            p ^= sj;
            cw.push(p);
        }
        Ok(cw)
    }

    pub fn is_codeword(&self, cw: &[u8]) -> bool {
        cw.len() == self.n
            && self
                .check_start
                .windows(2)
                .all(|w| self.check_vars[w[0]..w[1]].iter().fold(0u8, |acc, &v| acc ^ cw[v as usize]) == 0)
    }

    /// Layered normalized min-sum decoding; `llr` is positive for bit 0.
    /// Stops early once the hard decisions satisfy every check.
    pub fn decode(&self, llr: &[f64], max_iter: usize) -> Result<DecodeOutput> {
        if llr.len() != self.n {
            return Err(Error::Dimension(format!("code length {}, got {} LLRs", self.n, llr.len())));
        }
        let mut post = llr.to_vec();
        let mut c2v = vec![0.0; self.check_vars.len()];
        let mut hard: Vec<u8> = post.iter().map(|&l| u8::from(l < 0.0)).collect();
        let mut t = Vec::new();
        let mut iterations = 0;
        let mut ok = self.is_codeword(&hard);
        while !ok && iterations < max_iter {
            iterations += 1;
            for w in self.check_start.windows(2) {
                let (a, b) = (w[0], w[1]);
                let vars = &self.check_vars[a..b];
                t.clear();
                t.extend(vars.iter().zip(&c2v[a..b]).map(|(&v, &c)| post[v as usize] - c));
                let (mut min1, mut min2, mut at, mut sign) = (f64::INFINITY, f64::INFINITY, 0, false);
                for (i, &x) in t.iter().enumerate() {
                    let m = x.abs();
                    sign ^= x < 0.0;
                    if m < min1 {
                        min2 = min1;
                        min1 = m;
                        at = i;
                    } else if m < min2 {
                        min2 = m;
                    }
                }
                for (i, (&v, &x)) in vars.iter().zip(&t).enumerate() {
                    let mag = MIN_SUM_SCALE * if i == at { min2 } else { min1 };
                    let negative = sign ^ (x < 0.0);
                    let msg = if negative { -mag } else { mag };
                    c2v[a + i] = msg;
                    post[v as usize] = x + msg;
                }
            }
            for (h, &l) in hard.iter_mut().zip(&post) {
                *h = u8::from(l < 0.0);
            }
            ok = self.is_codeword(&hard);
        }
        hard.truncate(self.k);
        Ok(DecodeOutput { info: hard, iterations, syndrome_ok: ok })
    }
}
