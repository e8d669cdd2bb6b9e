//! Functional execution of a task graph on real residues.

use std::collections::HashMap;

use crate::hks::{EvaluationKey, HksError, HksParams};
use crate::rns::{intt, ntt, Domain, RnsPolynomial, Tower};

use super::{BufId, Kernel, TaskGraph, TaskKind};

fn missing(b: &BufId) -> HksError {
    HksError::Shape(format!("buffer {b:?} read before it was produced"))
}

/// Runs the compute tasks of `g` in id order and returns `(d0, d1)`.
///
/// Every tower is computed by the kernel named in its task, so a correct
/// graph reproduces the reference key switch bit for bit regardless of the
/// order the dataflow visits towers in.
pub fn replay(
    g: &TaskGraph,
    c1: &RnsPolynomial,
    evk: &EvaluationKey,
) -> Result<(RnsPolynomial, RnsPolynomial), HksError> {
    let p: &HksParams = &g.params;
    let kl = p.num_q_towers();
    if c1.num_towers() != kl || c1.domain() != Domain::Evaluation {
        return Err(HksError::Shape("replay expects c1 over Q in evaluation domain".into()));
    }
    let mut vals: HashMap<BufId, Vec<u64>> = HashMap::new();
    let get = |vals: &HashMap<BufId, Vec<u64>>, b: &BufId| -> Result<Vec<u64>, HksError> {
        match *b {
            BufId::Input(t) => Ok(c1.tower(t as usize).residues.clone()),
            BufId::Evk { digit, half, tower } => {
                Ok(evk.digit(digit as usize)[half as usize].tower(tower as usize).residues.clone())
            }
            _ => vals.get(b).cloned().ok_or_else(|| missing(b)),
        }
    };
    for t in g.tasks.iter().filter(|t| t.kind == TaskKind::Compute) {
        let (Some(kernel), [out]) = (t.kernel, t.buffers_out.as_slice()) else {
            return Err(HksError::Shape(format!("task {} has no kernel or output", t.id)));
        };
        let m = p.modulus(out.d_tower(kl));
        let ins = t.buffers_in.iter().map(|b| get(&vals, b)).collect::<Result<Vec<_>, _>>()?;
        let v = match kernel {
            Kernel::Intt => {
                let mut x = ins[0].clone();
                intt(&mut x, m);
                x
            }
            Kernel::Ntt => {
                let mut x = ins[0].clone();
                ntt(&mut x, m);
                x
            }
            Kernel::BConvPartial => {
                let refs: Vec<&[u64]> = ins.iter().map(|x| x.as_slice()).collect();
                match *out {
                    BufId::Conv { digit, tower } => {
                        let (j, e) = (digit as usize, tower as usize);
                        let table = p.modup_table(j);
                        table.convert_one(&table.prescale(&refs), p.modup_target_index(j, e))
                    }
                    BufId::MdConv { tower, .. } => {
                        let table = p.moddown_table();
                        table.convert_one(&table.prescale(&refs), tower as usize)
                    }
                    _ => return Err(HksError::Shape(format!("unexpected BConv output {out:?}"))),
                }
            }
            Kernel::PointMul => ins[0].iter().zip(&ins[1]).map(|(&a, &b)| m.mul(a, b)).collect(),
            Kernel::Add => {
                let mut acc = ins[0].clone();
                for x in &ins[1..] {
                    for (a, &b) in acc.iter_mut().zip(x) {
                        *a = m.add(*a, b);
                    }
                }
                acc
            }
            Kernel::ScaleSub => {
                let s = p.p_inv_mod_q()[out.d_tower(kl)];
                ins[0].iter().zip(&ins[1]).map(|(&a, &b)| m.mul(m.sub(a, b), s)).collect()
            }
        };
        vals.insert(*out, v);
    }
    let mut halves = Vec::with_capacity(2);
    for h in 0..2u32 {
        let towers = (0..kl)
            .map(|i| {
                let b = BufId::Out { half: h, tower: i as u32 };
                let residues = vals.remove(&b).ok_or_else(|| missing(&b))?;
                Ok(Tower { modulus: p.q_chain()[i].clone(), residues })
            })
            .collect::<Result<Vec<_>, HksError>>()?;
        halves.push(RnsPolynomial::from_towers(p.degree_log2(), towers, Domain::Evaluation)?);
    }
    let d1 = halves.pop().unwrap();
    let d0 = halves.pop().unwrap();
    Ok((d0, d1))
}
