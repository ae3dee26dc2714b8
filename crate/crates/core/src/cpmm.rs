//! Exact constant-product swap math.
//!
//! A pool holding reserves `R_in` and `R_out` and charging fee `f` on the input
//! returns `R_out·(1−f)·t / (R_in + (1−f)·t)` for an input of `t`. All amounts
//! are integers in base units; the formula is evaluated in exact rational
//! arithmetic and floored only when an integer output is required.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amount::{ratio_to_f64, Amount};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpmmError {
    #[error("pool {0} is inactive (a reserve is zero)")]
    InactivePool(PoolId),
    #[error("invalid token: {0}")]
    InvalidToken(String),
    #[error("invalid pool {pool}: {reason}")]
    InvalidPool { pool: PoolId, reason: String },
    #[error("invalid fee {0:?}: must be a rational in [0, 1)")]
    InvalidFee(String),
    #[error("token mismatch: {left} does not chain into {right}")]
    TokenMismatch { left: String, right: String },
    #[error("invalid effective pool coefficients ({a}, {b}, {c})")]
    InvalidCoefficients { a: f64, b: f64, c: f64 },
    #[error("marginal rate {lambda} outside (0, {max}]")]
    MarginalOutOfRange { lambda: f64, max: f64 },
    #[error("amount {0} is not a valid input")]
    InvalidAmount(f64),
}

/// Maximum number of decimals a token may declare.
pub const MAX_DECIMALS: u8 = 38;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenId {
    pub symbol: String,
    pub decimals: u8,
}

impl TokenId {
    pub fn new(symbol: impl Into<String>, decimals: u8) -> Result<Self, CpmmError> {
        let symbol = symbol.into();
        if symbol.trim().is_empty() {
            return Err(CpmmError::InvalidToken("empty symbol".into()));
        }
        if decimals > MAX_DECIMALS {
            return Err(CpmmError::InvalidToken(format!(
                "{symbol}: {decimals} decimals exceeds {MAX_DECIMALS}"
            )));
        }
        Ok(TokenId { symbol, decimals })
    }

    /// One whole token in base units.
    pub fn unit(&self) -> BigUint {
        BigUint::from(10u32).pow(self.decimals as u32)
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Venue {
    Uniswap,
    SushiSwap,
    Other(String),
}

impl From<String> for Venue {
    fn from(s: String) -> Self {
        match s.to_ascii_lowercase().as_str() {
            "uniswap" => Venue::Uniswap,
            "sushiswap" => Venue::SushiSwap,
            _ => Venue::Other(s),
        }
    }
}

impl From<Venue> for String {
    fn from(v: Venue) -> Self {
        v.to_string()
    }
}

impl fmt::Display for Venue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Venue::Uniswap => f.write_str("uniswap"),
            Venue::SushiSwap => f.write_str("sushiswap"),
            Venue::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoolId(pub String);

impl PoolId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PoolId {
    fn from(s: &str) -> Self {
        PoolId(s.to_string())
    }
}

/// Swap fee as an exact fraction of the input amount.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fee(Ratio<u64>);

impl Fee {
    pub const UNISWAP_V2: Fee = Fee::from_raw(3, 1000);

    const fn from_raw(num: u64, den: u64) -> Self {
        Fee(Ratio::new_raw(num, den))
    }

    pub fn new(num: u64, den: u64) -> Result<Self, CpmmError> {
        if den == 0 || num >= den {
            return Err(CpmmError::InvalidFee(format!("{num}/{den}")));
        }
        Ok(Fee(Ratio::new(num, den)))
    }

    pub fn zero() -> Self {
        Fee(Ratio::new_raw(0, 1))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// Numerator of `1 − f` over the same denominator.
    pub fn keep_numer(&self) -> u64 {
        self.denom() - self.numer()
    }

    pub fn keep_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.keep_numer()), BigInt::from(self.denom()))
    }

    /// `1 − f` as a float.
    pub fn keep_f64(&self) -> f64 {
        self.keep_numer() as f64 / self.denom() as f64
    }
}

impl Default for Fee {
    fn default() -> Self {
        Fee::UNISWAP_V2
    }
}

impl fmt::Display for Fee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Fee {
    type Err = CpmmError;

    /// Accepts `"3/1000"` or a plain decimal such as `"0.003"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CpmmError::InvalidFee(s.to_string());
        let s_trim = s.trim();
        if let Some((n, d)) = s_trim.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Fee::new(n, d).map_err(|_| bad());
        }
        let (int_part, frac_part) = s_trim.split_once('.').unwrap_or((s_trim, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(bad());
        }
        let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        if int != 0 {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let num: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        Fee::new(num, den).map_err(|_| bad())
    }
}

impl Serialize for Fee {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fee {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            // Plain JSON numbers go through their shortest decimal rendering.
            Raw::Number(x) => format!("{x}").parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which side of the pool is the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ZeroForOne,
    OneForZero,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::ZeroForOne => Direction::OneForZero,
            Direction::OneForZero => Direction::ZeroForOne,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pool {
    pub id: PoolId,
    pub venue: Venue,
    pub token0: TokenId,
    pub token1: TokenId,
    pub reserve0: Amount,
    pub reserve1: Amount,
    pub fee: Fee,
}

impl Pool {
    pub fn new(
        id: impl Into<PoolId>,
        venue: Venue,
        token0: TokenId,
        token1: TokenId,
        reserve0: Amount,
        reserve1: Amount,
        fee: Fee,
    ) -> Result<Self, CpmmError> {
        let id = id.into();
        if token0.symbol == token1.symbol {
            return Err(CpmmError::InvalidPool {
                pool: id,
                reason: format!("both sides are {}", token0.symbol),
            });
        }
        Ok(Pool { id, venue, token0, token1, reserve0, reserve1, fee })
    }

    pub fn is_active(&self) -> bool {
        !self.reserve0.is_zero() && !self.reserve1.is_zero()
    }

    pub fn ensure_active(&self) -> Result<(), CpmmError> {
        if self.is_active() {
            Ok(())
        } else {
            Err(CpmmError::InactivePool(self.id.clone()))
        }
    }

    /// `(input reserve, output reserve)` for a direction.
    pub fn reserves(&self, dir: Direction) -> (&Amount, &Amount) {
        match dir {
            Direction::ZeroForOne => (&self.reserve0, &self.reserve1),
            Direction::OneForZero => (&self.reserve1, &self.reserve0),
        }
    }

    /// `(input token, output token)` for a direction.
    pub fn tokens(&self, dir: Direction) -> (&TokenId, &TokenId) {
        match dir {
            Direction::ZeroForOne => (&self.token0, &self.token1),
            Direction::OneForZero => (&self.token1, &self.token0),
        }
    }

    /// Direction in which `token_in` is sold, if it belongs to the pool.
    pub fn direction_for(&self, token_in: &str) -> Option<Direction> {
        if self.token0.symbol == token_in {
            Some(Direction::ZeroForOne)
        } else if self.token1.symbol == token_in {
            Some(Direction::OneForZero)
        } else {
            None
        }
    }

    /// Applies a swap of `amount_in` returning `amount_out` to the reserves.
    /// The full input (fee included) stays in the pool. Saturates the output
    /// side at zero.
    pub fn apply(&mut self, dir: Direction, amount_in: &Amount, amount_out: &Amount) {
        let (r_in, r_out) = match dir {
            Direction::ZeroForOne => (&mut self.reserve0, &mut self.reserve1),
            Direction::OneForZero => (&mut self.reserve1, &mut self.reserve0),
        };
        *r_in += amount_in;
        if &*r_out >= amount_out {
            *r_out -= amount_out;
        } else {
            *r_out = BigUint::zero();
        }
    }
}

/// Output of a swap in exact rationals, before flooring.
pub fn swap_out_exact(pool: &Pool, dir: Direction, amount_in: &Amount) -> Result<BigRational, CpmmError> {
    let t = BigRational::from_integer(BigInt::from(amount_in.clone()));
    swap_out_rational(pool, dir, &t)
}

/// Exact swap output for a (possibly fractional) input, used to chain hops
/// without intermediate truncation.
pub fn swap_out_rational(pool: &Pool, dir: Direction, amount_in: &BigRational) -> Result<BigRational, CpmmError> {
    pool.ensure_active()?;
    let (r_in, r_out) = pool.reserves(dir);
    let r_in = BigRational::from_integer(BigInt::from(r_in.clone()));
    let r_out = BigRational::from_integer(BigInt::from(r_out.clone()));
    let kept = pool.fee.keep_ratio() * amount_in;
    let denom = r_in + &kept;
    if denom.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(r_out * kept / denom)
}

/// Integer swap output: the exact formula floored to base units.
pub fn swap_out(pool: &Pool, dir: Direction, amount_in: &Amount) -> Result<Amount, CpmmError> {
    pool.ensure_active()?;
    let (r_in, r_out) = pool.reserves(dir);
    let keep = BigUint::from(pool.fee.keep_numer());
    let den = BigUint::from(pool.fee.denom());
    let kept_in = &keep * amount_in;
    let numerator = r_out * &kept_in;
    let denominator = r_in * &den + kept_in;
    if denominator.is_zero() {
        return Ok(BigUint::zero());
    }
    Ok(numerator / denominator)
}

/// Marginal input paid per unit of output at zero trade size:
/// `R_in / (R_out·(1−f))`.
pub fn spot_price(pool: &Pool, dir: Direction) -> Result<f64, CpmmError> {
    pool.ensure_active()?;
    let (r_in, r_out) = pool.reserves(dir);
    let num = r_in * BigUint::from(pool.fee.denom());
    let den = r_out * BigUint::from(pool.fee.keep_numer());
    if den.is_zero() {
        return Ok(f64::INFINITY);
    }
    Ok(ratio_to_f64(&num, &den))
}

/// Floors a non-negative rational to an integer amount.
pub fn floor_amount(value: &BigRational) -> Amount {
    let floored = value.floor().to_integer();
    floored.to_biguint().unwrap_or_default()
}
