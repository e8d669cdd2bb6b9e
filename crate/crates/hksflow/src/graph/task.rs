use std::fmt;
use std::str::FromStr;

/// Logical on-chip buffer: one tower of some intermediate.
///
/// `tower` fields index the canonical D basis (Q towers first, then P);
/// `k` in [`BufId::MdCoef`] indexes the P towers only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BufId {
    /// Input tower of c1 (evaluation domain).
    Input(u32),
    /// INTT of an input tower.
    Coef(u32),
    /// BConv output of digit `digit` for D tower `tower` (coefficient domain).
    Conv { digit: u32, tower: u32 },
    /// NTT of a [`BufId::Conv`] tower.
    ConvNtt { digit: u32, tower: u32 },
    Evk { digit: u32, half: u32, tower: u32 },
    /// Partial product of one digit with its key.
    Prod { digit: u32, half: u32, tower: u32 },
    /// Running ModUp sum.
    Acc { half: u32, tower: u32 },
    /// INTT of a P-tower accumulator.
    MdCoef { half: u32, k: u32 },
    MdConv { half: u32, tower: u32 },
    MdNtt { half: u32, tower: u32 },
    /// Final output tower of (d0, d1).
    Out { half: u32, tower: u32 },
}

impl BufId {
    pub fn is_evk(&self) -> bool {
        matches!(self, BufId::Evk { .. })
    }

    pub fn is_output(&self) -> bool {
        matches!(self, BufId::Out { .. })
    }

    /// Resident off-chip before the key switch starts.
    pub fn is_external(&self) -> bool {
        matches!(self, BufId::Input(_) | BufId::Evk { .. })
    }

    /// Index of the tower's modulus in the D basis.
    pub fn d_tower(&self, num_q_towers: usize) -> usize {
        match *self {
            BufId::Input(t) | BufId::Coef(t) => t as usize,
            BufId::MdCoef { k, .. } => num_q_towers + k as usize,
            BufId::Conv { tower, .. }
            | BufId::ConvNtt { tower, .. }
            | BufId::Evk { tower, .. }
            | BufId::Prod { tower, .. }
            | BufId::Acc { tower, .. }
            | BufId::MdConv { tower, .. }
            | BufId::MdNtt { tower, .. }
            | BufId::Out { tower, .. } => tower as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Load,
    Store,
    Compute,
}

impl TaskKind {
    pub fn is_memory(&self) -> bool {
        !matches!(self, TaskKind::Compute)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Load => "Load",
            TaskKind::Store => "Store",
            TaskKind::Compute => "Compute",
        }
    }
}

impl FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Load" => Ok(TaskKind::Load),
            "Store" => Ok(TaskKind::Store),
            "Compute" => Ok(TaskKind::Compute),
            _ => Err(format!("unknown task kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Intt,
    Ntt,
    BConvPartial,
    PointMul,
    Add,
    ScaleSub,
}

impl Kernel {
    pub const ALL: [Kernel; 6] =
        [Kernel::Intt, Kernel::Ntt, Kernel::BConvPartial, Kernel::PointMul, Kernel::Add, Kernel::ScaleSub];

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Intt => "INTT",
            Kernel::Ntt => "NTT",
            Kernel::BConvPartial => "BConvPartial",
            Kernel::PointMul => "PointMul",
            Kernel::Add => "Add",
            Kernel::ScaleSub => "ScaleSub",
        }
    }

    /// Modular operations of one task with `inputs` input towers.
    pub fn ops(&self, degree_log2: u32, inputs: usize) -> u64 {
        let n = 1u64 << degree_log2;
        match self {
            Kernel::Intt | Kernel::Ntt => n * degree_log2 as u64,
            Kernel::BConvPartial => 2 * n * inputs as u64,
            Kernel::PointMul => n,
            Kernel::Add => n * (inputs as u64 - 1),
            Kernel::ScaleSub => 2 * n,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kernel::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown kernel `{s}`"))
    }
}

/// One node of the task DAG.
///
/// `slots` records the on-chip slot touched by the task: the destination of a
/// Load, the source of a Store, and one slot per output of a Compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub id: usize,
    pub kind: TaskKind,
    pub kernel: Option<Kernel>,
    pub bytes: u64,
    pub ops: u64,
    pub deps: Vec<usize>,
    pub buffers_in: Vec<BufId>,
    pub buffers_out: Vec<BufId>,
    pub slots: Vec<u32>,
}

impl Task {
    /// Load of evaluation-key material.
    pub fn is_evk_load(&self) -> bool {
        self.kind == TaskKind::Load && self.buffers_out.first().is_some_and(|b| b.is_evk())
    }
}
