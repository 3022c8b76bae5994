use super::Event;

/// Multiplier on the linear spending schedule for paced events.
pub const PACING_HEADROOM: f64 = 1.5;
/// Paced events may always use this many packets, so play can be
/// coordinated from the first tick.
pub const PACING_FLOOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetState {
    pub total_budget: u32,
    pub spent: u32,
    /// Fraction of the budget only priority-1 events may use.
    pub reserve_fraction: f64,
}

impl BudgetState {
    pub fn new(total_budget: u32, reserve_fraction: f64) -> Self {
        BudgetState {
            total_budget,
            spent: 0,
            reserve_fraction,
        }
    }

    pub fn remaining(&self) -> u32 {
        self.total_budget - self.spent
    }

    /// Packets paced events may have used by `now`.
    pub fn allowance(&self, now: f64, match_len: f64) -> f64 {
        let share = if match_len > 0.0 { now / match_len } else { 1.0 };
        (f64::from(self.total_budget) * share * PACING_HEADROOM).max(PACING_FLOOR)
    }
}

/// Decides whether `event` may be sent at `now` and charges it if so.
pub fn budget_admit(budget: BudgetState, event: &Event, now: f64, match_len: f64) -> (bool, BudgetState) {
    let spent = f64::from(budget.spent);
    let total = f64::from(budget.total_budget);
    let admit = if event.kind().priority() == 1 {
        budget.spent < budget.total_budget
    } else {
        spent < (1.0 - budget.reserve_fraction) * total && spent < budget.allowance(now, match_len)
    };
    if admit {
        let mut next = budget;
        next.spent += 1;
        (true, next)
    } else {
        (false, budget)
    }
}
