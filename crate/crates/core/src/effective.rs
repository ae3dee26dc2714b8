//! Effective pools: the function `g(x) = a·x / (b + c·x)`.
//!
//! A single pool, a chain of pools, and a cycle of pools all reduce to this
//! form, since the family is closed under composition. `g(0) = 0`, `g` is
//! strictly increasing and concave, `g'(0) = a/b` and `g < a/c`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amount::{ratio_to_f64, Amount};
use crate::cpmm::{swap_out_rational, CpmmError, Direction, Pool, PoolId, TokenId};
use crate::snapshot::BlockSnapshot;

#[derive(Clone, Debug, PartialEq)]
pub struct EffectivePool {
    a: f64,
    b: f64,
    c: f64,
    pub in_token: TokenId,
    pub out_token: TokenId,
}

impl EffectivePool {
    pub fn new(a: f64, b: f64, c: f64, in_token: TokenId, out_token: TokenId) -> Result<Self, CpmmError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(a) && ok(b) && ok(c)) {
            return Err(CpmmError::InvalidCoefficients { a, b, c });
        }
        Ok(EffectivePool { a, b, c, in_token, out_token })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a * x / (self.b + self.c * x)
    }

    pub fn marginal(&self, x: f64) -> f64 {
        let d = self.b + self.c * x;
        // a·b/d² written to avoid overflowing the squares on deep multi-hop paths.
        (self.a / d) * (self.b / d)
    }

    /// `g'(0) = a/b`.
    pub fn marginal_at_zero(&self) -> f64 {
        self.a / self.b
    }

    /// Supremum of the output, `a/c`.
    pub fn output_bound(&self) -> f64 {
        self.a / self.c
    }

    /// Input at which the marginal rate equals `lambda`, clamped at zero.
    pub fn inverse_marginal(&self, lambda: f64) -> Result<f64, CpmmError> {
        let max = self.marginal_at_zero();
        if !(lambda > 0.0 && lambda <= max) {
            return Err(CpmmError::MarginalOutOfRange { lambda, max });
        }
        Ok(self.inverse_marginal_unchecked(lambda))
    }

    pub(crate) fn inverse_marginal_unchecked(&self, lambda: f64) -> f64 {
        // (sqrt(a·b/λ) − b)/c = sqrt(b)·(sqrt(a/λ) − sqrt(b))/c
        let sb = self.b.sqrt();
        let x = sb * ((self.a / lambda).sqrt() - sb) / self.c;
        x.max(0.0)
    }
}

impl fmt::Display for EffectivePool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}: {}·x/({} + {}·x)", self.in_token, self.out_token, self.a, self.b, self.c)
    }
}

/// `(a, b, c) = (R_out·(1−f), R_in, 1−f)`.
pub fn effective_of_pool(pool: &Pool, dir: Direction) -> Result<EffectivePool, CpmmError> {
    pool.ensure_active()?;
    let (r_in, r_out) = pool.reserves(dir);
    let (t_in, t_out) = pool.tokens(dir);
    let keep = Amount::from(pool.fee.keep_numer());
    let den = Amount::from(pool.fee.denom());
    let a = ratio_to_f64(&(r_out * &keep), &den);
    let b = ratio_to_f64(r_in, &Amount::from(1u32));
    let c = ratio_to_f64(&keep, &den);
    EffectivePool::new(a, b, c, t_in.clone(), t_out.clone())
}

/// `second ∘ first`.
pub fn compose(first: &EffectivePool, second: &EffectivePool) -> Result<EffectivePool, CpmmError> {
    if first.out_token.symbol != second.in_token.symbol {
        return Err(CpmmError::TokenMismatch {
            left: first.out_token.symbol.clone(),
            right: second.in_token.symbol.clone(),
        });
    }
    EffectivePool::new(
        first.a * second.a,
        first.b * second.b,
        second.b * first.c + second.c * first.a,
        first.in_token.clone(),
        second.out_token.clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hop {
    pub pool: PoolId,
    pub dir: Direction,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("pool {0} is not in the snapshot")]
    MissingPool(PoolId),
    #[error("pool {0} is inactive")]
    InactivePool(PoolId),
    #[error("path is empty")]
    Empty,
    #[error("hop {index} does not chain: expected input {expected}, pool gives {found}")]
    Broken { index: usize, expected: String, found: String },
    #[error("pool {0} appears twice")]
    RepeatedPool(PoolId),
    #[error(transparent)]
    Math(#[from] CpmmError),
}

/// An ordered chain of hops from `in_token` to `out_token`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TradePath {
    pub hops: Vec<Hop>,
    pub in_token: TokenId,
    pub out_token: TokenId,
}

impl TradePath {
    /// Builds a path, checking that hops chain and no pool repeats. Pools are
    /// looked up through `pool_of`.
    pub fn new<'a>(
        hops: Vec<Hop>,
        pool_of: impl Fn(&PoolId) -> Option<&'a Pool>,
    ) -> Result<Self, PathError> {
        let (in_token, out_token) = check_chain(&hops, &pool_of)?;
        Ok(TradePath { hops, in_token, out_token })
    }

    pub(crate) fn from_parts(hops: Vec<Hop>, in_token: TokenId, out_token: TokenId) -> Self {
        TradePath { hops, in_token, out_token }
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn pool_ids(&self) -> impl Iterator<Item = &PoolId> {
        self.hops.iter().map(|h| &h.pool)
    }

    /// Human-readable label such as `uni-USDC-BTC>uni-BTC-ETH`.
    pub fn label(&self) -> String {
        self.hops.iter().map(|h| h.pool.as_str()).collect::<Vec<_>>().join(">")
    }
}

pub(crate) fn check_chain<'a>(
    hops: &[Hop],
    pool_of: &impl Fn(&PoolId) -> Option<&'a Pool>,
) -> Result<(TokenId, TokenId), PathError> {
    let first = hops.first().ok_or(PathError::Empty)?;
    let mut seen = std::collections::BTreeSet::new();
    let p0 = pool_of(&first.pool).ok_or_else(|| PathError::MissingPool(first.pool.clone()))?;
    let in_token = p0.tokens(first.dir).0.clone();
    let mut current = in_token.clone();
    for (index, hop) in hops.iter().enumerate() {
        if !seen.insert(&hop.pool) {
            return Err(PathError::RepeatedPool(hop.pool.clone()));
        }
        let pool = pool_of(&hop.pool).ok_or_else(|| PathError::MissingPool(hop.pool.clone()))?;
        let (t_in, t_out) = pool.tokens(hop.dir);
        if t_in.symbol != current.symbol {
            return Err(PathError::Broken {
                index,
                expected: current.symbol.clone(),
                found: t_in.symbol.clone(),
            });
        }
        current = t_out.clone();
    }
    Ok((in_token, current))
}

/// Left fold of [`compose`] over the hops, each hop at its own fee.
pub fn reduce_hops(hops: &[Hop], snapshot: &BlockSnapshot) -> Result<EffectivePool, PathError> {
    let mut acc: Option<EffectivePool> = None;
    for hop in hops {
        let pool = snapshot.pool(&hop.pool).ok_or_else(|| PathError::MissingPool(hop.pool.clone()))?;
        if !pool.is_active() {
            return Err(PathError::InactivePool(hop.pool.clone()));
        }
        let ep = effective_of_pool(pool, hop.dir)?;
        acc = Some(match acc {
            None => ep,
            Some(prev) => compose(&prev, &ep)?,
        });
    }
    acc.ok_or(PathError::Empty)
}

pub fn reduce_path(path: &TradePath, snapshot: &BlockSnapshot) -> Result<EffectivePool, PathError> {
    reduce_hops(&path.hops, snapshot)
}

/// Exact output of routing `amount_in` through `hops`, without truncating
/// between hops.
pub fn hops_output_exact(hops: &[Hop], snapshot: &BlockSnapshot, amount_in: &Amount) -> Result<BigRational, PathError> {
    let mut value = BigRational::from_integer(BigInt::from(amount_in.clone()));
    for hop in hops {
        let pool = snapshot.pool(&hop.pool).ok_or_else(|| PathError::MissingPool(hop.pool.clone()))?;
        if !pool.is_active() {
            return Err(PathError::InactivePool(hop.pool.clone()));
        }
        value = swap_out_rational(pool, hop.dir, &value)?;
    }
    Ok(value)
}

/// Integer output of a path: exact evaluation floored once at the end.
pub fn path_output(path: &TradePath, snapshot: &BlockSnapshot, amount_in: &Amount) -> Result<Amount, PathError> {
    let exact = hops_output_exact(&path.hops, snapshot, amount_in)?;
    Ok(crate::cpmm::floor_amount(&exact))
}
