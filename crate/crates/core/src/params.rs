//! Technology and NoC timing parameters.

use crate::error::{Error, Result};
use crate::units::{Energy, Power, Time};

/// Per-bit energies, router static power and the wormhole timing
/// constants. Router buffers are unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NocParams {
    /// Router bit energy.
    pub erbit: Energy,
    /// Inter-tile link bit energy (horizontal and vertical alike).
    pub elbit: Energy,
    /// Core-to-router attachment link bit energy.
    pub ecbit: Energy,
    /// Static power of one router.
    pub ps_router: Power,
    /// Clock period.
    pub lambda: Time,
    /// Cycles per routing decision.
    pub tr: u32,
    /// Cycles per flit per link.
    pub tl: u32,
    /// Bits per flit.
    pub flit_width: u32,
}

impl NocParams {
    /// 1 pJ/bit for routers and links, 1 ns clock, two-cycle routing,
    /// one-cycle links, single-bit flits and no static power.
    pub fn unit_example() -> Self {
        NocParams {
            erbit: Energy::from_pj(1.0),
            elbit: Energy::from_pj(1.0),
            ecbit: Energy::ZERO,
            ps_router: Power::default(),
            lambda: Time::from_ns(1),
            tr: 2,
            tl: 1,
            flit_width: 1,
        }
    }

    /// Older process, 100 MHz: leakage is a negligible part of the total.
    pub fn t035() -> Self {
        NocParams {
            erbit: Energy::from_pj(2.0),
            elbit: Energy::from_pj(1.0),
            ecbit: Energy::ZERO,
            ps_router: Power::from_pj_per_ns(T035_PS_ROUTER_PJ_PER_NS),
            lambda: Time::from_ns(10),
            tr: 2,
            tl: 1,
            flit_width: 16,
        }
    }

    /// Deep-submicron process, 1 GHz: leakage is a large share of the total.
    pub fn t007() -> Self {
        NocParams {
            erbit: Energy::from_pj(0.2),
            elbit: Energy::from_pj(0.1),
            ecbit: Energy::ZERO,
            ps_router: Power::from_pj_per_ns(T007_PS_ROUTER_PJ_PER_NS),
            lambda: Time::from_ns(1),
            tr: 2,
            tl: 1,
            flit_width: 16,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "t035" => Some(Self::t035()),
            "t007" => Some(Self::t007()),
            "unit" => Some(Self::unit_example()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("erbit", self.erbit.aj()),
            ("elbit", self.elbit.aj()),
            ("ecbit", self.ecbit.aj()),
            ("ps_router", self.ps_router.0),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be a finite non-negative number, got {v}")));
            }
        }
        if self.lambda == Time::ZERO || self.lambda > MAX_LAMBDA {
            return Err(Error::InvalidParams(format!("clock period must lie in (0, {MAX_LAMBDA}] ns")));
        }
        if self.tr == 0 || self.tl == 0 || self.tr > MAX_CYCLES || self.tl > MAX_CYCLES {
            return Err(Error::InvalidParams(format!("tr and tl must lie in 1..={MAX_CYCLES} cycles")));
        }
        if self.flit_width == 0 {
            return Err(Error::InvalidParams("flit width must be at least one bit".into()));
        }
        Ok(())
    }
}

const MAX_LAMBDA: Time = Time::from_ns(1_000_000);
const MAX_CYCLES: u32 = 1_000;

// Chosen so that static energy is about 0.5 % and 20 % of the total on the
// reference workload: preset 3x3/3 with core i on tile i + 1 (checked in
// `tests/presets.rs`).
pub(crate) const T035_PS_ROUTER_PJ_PER_NS: f64 = 0.011;
pub(crate) const T007_PS_ROUTER_PJ_PER_NS: f64 = 0.5;
