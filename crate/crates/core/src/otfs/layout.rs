use serde::{Deserialize, Serialize};

use crate::dd::DdGrid;
use crate::error::{Error, Result};

/// Pilot-region width as a multiple of `k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutVariant {
    Narrow,
    Medium,
    Wide,
}

impl LayoutVariant {
    pub const ALL: [LayoutVariant; 3] = [LayoutVariant::Narrow, LayoutVariant::Medium, LayoutVariant::Wide];

    pub fn width_factor(self) -> usize {
        match self {
            LayoutVariant::Narrow => 1,
            LayoutVariant::Medium => 2,
            LayoutVariant::Wide => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutVariant::Narrow => "narrow",
            LayoutVariant::Medium => "medium",
            LayoutVariant::Wide => "wide",
        }
    }
}

/// `ceil(B tau_max)`: delay taps spanned by the channel.
pub fn k_max_for(bandwidth: f64, tau_max: f64) -> usize {
    // tolerate rounding in B * tau_max landing just above an integer
    (bandwidth * tau_max - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Pilot,
    PilotRegion,
    Guard,
    Data,
}

/// Partition of the fundamental domain into pilot, pilot region, guard
/// and data. Index lists are flat delay-major indices in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameLayout {
    grid: DdGrid,
    variant: LayoutVariant,
    k_max: usize,
    pilot: (usize, usize),
    roles: Vec<Role>,
    pilot_region: Vec<usize>,
    guard_region: Vec<usize>,
    data_region: Vec<usize>,
}

impl FrameLayout {
    /// Layout for a channel with delay spread `tau_max`.
    pub fn build(grid: DdGrid, tau_max: f64, variant: LayoutVariant) -> Result<Self> {
        Self::with_k_max(grid, k_max_for(grid.bandwidth(), tau_max), variant)
    }

    /// The pilot sits at `(M/2, N/2)`. The pilot region is a full-height
    /// strip `max(1, factor * k_max)` columns wide starting just left of
    /// center so the pilot column is inside it; a `k_max`-wide guard strip
    /// flanks it on each side.
    pub fn with_k_max(grid: DdGrid, k_max: usize, variant: LayoutVariant) -> Result<Self> {
        let (m, n) = (grid.m(), grid.n());
        let width = (variant.width_factor() * k_max).clamp(1, m);
        if width + 2 * k_max >= m {
            return Err(Error::InfeasibleLayout(format!(
                "pilot strip {width} + guards 2x{k_max} leave no data columns in M = {m}"
            )));
        }
        let pilot = (m / 2, n / 2);
        let start = pilot.0 as i64 - ((width as i64 - 1) / 2);
        let col = |c: i64| c.rem_euclid(m as i64) as usize;
        let mut col_role = vec![Role::Data; m];
        for c in start..start + width as i64 {
            col_role[col(c)] = Role::PilotRegion;
        }
        for c in 1..=k_max as i64 {
            col_role[col(start - c)] = Role::Guard;
            col_role[col(start + width as i64 - 1 + c)] = Role::Guard;
        }
        let mut roles = Vec::with_capacity(m * n);
        for role in col_role.iter().take(m) {
            roles.extend(std::iter::repeat_n(*role, n));
        }
        roles[grid.index(pilot.0, pilot.1)] = Role::Pilot;
        Ok(Self::from_roles(grid, variant, k_max, pilot, roles))
    }

    /// Pilot at the center and nothing else: every other carrier is guard.
    pub fn pilot_only(grid: DdGrid) -> Self {
        let pilot = (grid.m() / 2, grid.n() / 2);
        let mut roles = vec![Role::Guard; grid.len()];
        roles[grid.index(pilot.0, pilot.1)] = Role::Pilot;
        Self::from_roles(grid, LayoutVariant::Wide, grid.m().saturating_sub(1), pilot, roles)
    }

    fn from_roles(grid: DdGrid, variant: LayoutVariant, k_max: usize, pilot: (usize, usize), roles: Vec<Role>) -> Self {
        let collect = |r: Role| roles.iter().enumerate().filter(|(_, &x)| x == r).map(|(i, _)| i).collect();
        Self {
            grid,
            variant,
            k_max,
            pilot,
            pilot_region: collect(Role::PilotRegion),
            guard_region: collect(Role::Guard),
            data_region: collect(Role::Data),
            roles,
        }
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn variant(&self) -> LayoutVariant {
        self.variant
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn pilot(&self) -> (usize, usize) {
        self.pilot
    }

    pub fn role(&self, k: usize, l: usize) -> Role {
        self.roles[self.grid.index(k, l)]
    }

    pub fn pilot_region(&self) -> &[usize] {
        &self.pilot_region
    }

    pub fn guard_region(&self) -> &[usize] {
        &self.guard_region
    }

    pub fn data_region(&self) -> &[usize] {
        &self.data_region
    }

    /// Fraction of carriers not carrying data.
    pub fn overhead(&self) -> f64 {
        1.0 - self.data_region.len() as f64 / self.grid.len() as f64
    }
}
