//! Compute-order schedules of the three dataflows, before memory planning.

use crate::hks::HksParams;

use super::{BufId, Kernel};

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub kernel: Kernel,
    pub ins: Vec<BufId>,
    pub outs: Vec<BufId>,
    /// Stage label; max-parallel schedules keep each stage's towers resident
    /// until the stage ends when memory is unbounded.
    pub stage: u32,
}

struct Builder<'a> {
    p: &'a HksParams,
    steps: Vec<Step>,
    stage: u32,
}

fn u(x: usize) -> u32 {
    x as u32
}

impl<'a> Builder<'a> {
    fn new(p: &'a HksParams) -> Self {
        Builder { p, steps: Vec::new(), stage: 0 }
    }

    fn push(&mut self, kernel: Kernel, ins: Vec<BufId>, out: BufId) {
        self.steps.push(Step { kernel, ins, outs: vec![out], stage: self.stage });
    }

    fn next_stage(&mut self) {
        self.stage += 1;
    }

    fn in_digit(&self, j: usize, e: usize) -> bool {
        self.p.digit_range(j).contains(&e)
    }

    fn coefs(&self, j: usize) -> Vec<BufId> {
        self.p.digit_range(j).map(|t| BufId::Coef(u(t))).collect()
    }

    /// Extended tower `e` of digit `j`: the input itself when `j` owns it.
    fn ext(&self, j: usize, e: usize) -> BufId {
        if self.in_digit(j, e) {
            BufId::Input(u(e))
        } else {
            BufId::ConvNtt { digit: u(j), tower: u(e) }
        }
    }

    fn intt_digit(&mut self, j: usize) {
        for t in self.p.digit_range(j) {
            self.push(Kernel::Intt, vec![BufId::Input(u(t))], BufId::Coef(u(t)));
        }
    }

    fn extend(&mut self, j: usize, e: usize) {
        let conv = BufId::Conv { digit: u(j), tower: u(e) };
        self.push(Kernel::BConvPartial, self.coefs(j), conv);
        self.push(Kernel::Ntt, vec![conv], BufId::ConvNtt { digit: u(j), tower: u(e) });
    }

    fn product(&mut self, j: usize, h: usize, e: usize, first: bool) -> BufId {
        let out = if first {
            BufId::Acc { half: u(h), tower: u(e) }
        } else {
            BufId::Prod { digit: u(j), half: u(h), tower: u(e) }
        };
        let evk = BufId::Evk { digit: u(j), half: u(h), tower: u(e) };
        self.push(Kernel::PointMul, vec![self.ext(j, e), evk], out);
        out
    }

    fn accumulate(&mut self, h: usize, e: usize, prod: BufId) {
        let acc = BufId::Acc { half: u(h), tower: u(e) };
        self.push(Kernel::Add, vec![acc, prod], acc);
    }

    fn md_intt(&mut self, h: usize) {
        let kl = self.p.num_q_towers();
        for k in 0..self.p.num_p_towers() {
            self.push(Kernel::Intt, vec![BufId::Acc { half: u(h), tower: u(kl + k) }], BufId::MdCoef {
                half: u(h),
                k: u(k),
            });
        }
    }

    fn md_convert(&mut self, h: usize, i: usize) {
        let ins = (0..self.p.num_p_towers()).map(|k| BufId::MdCoef { half: u(h), k: u(k) }).collect();
        let conv = BufId::MdConv { half: u(h), tower: u(i) };
        self.push(Kernel::BConvPartial, ins, conv);
        self.push(Kernel::Ntt, vec![conv], BufId::MdNtt { half: u(h), tower: u(i) });
    }

    fn md_scale(&mut self, h: usize, i: usize) {
        let ins = vec![BufId::Acc { half: u(h), tower: u(i) }, BufId::MdNtt { half: u(h), tower: u(i) }];
        self.push(Kernel::ScaleSub, ins, BufId::Out { half: u(h), tower: u(i) });
    }
}

/// Stage-major: every stage runs over all towers and digits before the next.
/// BConv and its NTT are fused per output tower.
pub(crate) fn max_parallel(p: &HksParams) -> Vec<Step> {
    let mut b = Builder::new(p);
    let (kl, d, dnum) = (p.num_q_towers(), p.num_d_towers(), p.dnum());
    for t in 0..kl {
        b.push(Kernel::Intt, vec![BufId::Input(u(t))], BufId::Coef(u(t)));
    }
    b.next_stage();
    for j in 0..dnum {
        for e in (0..d).filter(|&e| !p.digit_range(j).contains(&e)) {
            b.extend(j, e);
        }
    }
    b.next_stage();
    for j in 0..dnum {
        for e in 0..d {
            for h in 0..2 {
                b.product(j, h, e, dnum == 1);
            }
        }
    }
    b.next_stage();
    if dnum > 1 {
        for h in 0..2 {
            for e in 0..d {
                let ins = (0..dnum).map(|j| BufId::Prod { digit: u(j), half: u(h), tower: u(e) }).collect();
                b.push(Kernel::Add, ins, BufId::Acc { half: u(h), tower: u(e) });
            }
        }
    }
    b.next_stage();
    for h in 0..2 {
        b.md_intt(h);
    }
    b.next_stage();
    for h in 0..2 {
        for i in 0..kl {
            b.md_convert(h, i);
        }
    }
    b.next_stage();
    for h in 0..2 {
        for i in 0..kl {
            b.md_scale(h, i);
        }
    }
    b.steps
}

/// How digit-centric accumulates partial products across digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum DcReduce {
    /// Partial products spill; one dnum-input add per tower after the last digit.
    Deferred,
    /// A running sum per tower stays resident between digits.
    Running,
}

/// Digit-major: each digit runs INTT, BConv, NTT and its products before the
/// next digit; ModDown then runs half by half.
pub(crate) fn digit_centric(p: &HksParams, reduce: DcReduce) -> Vec<Step> {
    let (kl, d, dnum) = (p.num_q_towers(), p.num_d_towers(), p.dnum());
    if dnum == 1 {
        return max_parallel(p);
    }
    let mut b = Builder::new(p);
    for j in 0..dnum {
        b.intt_digit(j);
        for e in (0..d).filter(|&e| !p.digit_range(j).contains(&e)) {
            b.extend(j, e);
        }
        match reduce {
            DcReduce::Deferred => {
                for e in 0..d {
                    for h in 0..2 {
                        b.product(j, h, e, false);
                    }
                }
                if j == dnum - 1 {
                    for h in 0..2 {
                        for e in 0..d {
                            let ins = (0..dnum).map(|j| BufId::Prod { digit: u(j), half: u(h), tower: u(e) }).collect();
                            b.push(Kernel::Add, ins, BufId::Acc { half: u(h), tower: u(e) });
                        }
                    }
                }
            }
            DcReduce::Running => {
                let mut prods = Vec::new();
                for e in 0..d {
                    for h in 0..2 {
                        prods.push((h, e, b.product(j, h, e, j == 0)));
                    }
                }
                if j > 0 {
                    prods.sort_by_key(|&(h, e, _)| (h, e));
                    for (h, e, prod) in prods {
                        b.accumulate(h, e, prod);
                    }
                }
            }
        }
    }
    for h in 0..2 {
        b.md_intt(h);
        for i in 0..kl {
            b.md_convert(h, i);
        }
        for i in 0..kl {
            b.md_scale(h, i);
        }
    }
    b.steps
}

/// Output-tower-major. The first pass produces the Q towers (last digit's
/// towers first), taking one BConv contribution from every non-owning digit
/// and the owning digit's bypassed tower last. The P towers follow: first
/// from the earlier digits, then the last digit's contribution in another
/// sweep. ModDown emits output towers in reverse Q order so that the
/// most recently touched accumulators are consumed first.
pub(crate) fn output_centric(p: &HksParams) -> Vec<Step> {
    let (kl, d, dnum) = (p.num_q_towers(), p.num_d_towers(), p.dnum());
    let last = dnum - 1;
    let mut b = Builder::new(p);
    let mut intt_done = vec![false; dnum];
    for (j, done) in intt_done.iter_mut().enumerate().take(last) {
        b.intt_digit(j);
        *done = true;
    }
    let mut contribute = |b: &mut Builder, j: usize, e: usize, first: bool| {
        if !b.in_digit(j, e) {
            if !intt_done[j] {
                b.intt_digit(j);
                intt_done[j] = true;
            }
            b.extend(j, e);
        }
        for h in 0..2 {
            let prod = b.product(j, h, e, first);
            if !first {
                b.accumulate(h, e, prod);
            }
        }
    };
    let last_range = p.digit_range(last);
    let q_order: Vec<usize> = last_range.clone().chain(0..last_range.start).collect();
    for &e in &q_order {
        let own = p.owner(e);
        let order: Vec<usize> = (0..dnum).filter(|&j| j != own).chain([own]).collect();
        for (i, &j) in order.iter().enumerate() {
            contribute(&mut b, j, e, i == 0);
        }
    }
    if dnum > 1 {
        for e in kl..d {
            for j in 0..last {
                contribute(&mut b, j, e, j == 0);
            }
        }
        for e in kl..d {
            contribute(&mut b, last, e, false);
        }
    } else {
        for e in kl..d {
            contribute(&mut b, 0, e, true);
        }
    }
    for h in 0..2 {
        b.md_intt(h);
        for &i in q_order.iter().rev() {
            b.md_convert(h, i);
            b.md_scale(h, i);
        }
    }
    b.steps
}
