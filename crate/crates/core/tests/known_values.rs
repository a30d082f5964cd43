//! Worked values: hand-derived examples and frozen oracle outputs.

use std::sync::Arc;

use baire_lab::baire::{baire_norm, baire_norm_oracle, baire_norm_with_witness, incomparable_block_profile, BaireParams, Exponent};
use baire_lab::hi::{dg_lower_bound, dg_upper_bound, ground_norm, schedule, OpPair};
use baire_lab::sequence::{equivalence_ratio_bounds, FiniteBlockSequence, NormContext, NormKind};
use baire_lab::tree::{chain_tree, make_tree, rank, star_tree, Segment};
use baire_lab::tsirelson::{tsirelson_iterate, tsirelson_norm, verify_block_domination, verify_sandwich18, TsirelsonVariant};
use baire_lab::vector::{base_norm_of_segment, int, rat};
use baire_lab::{BaseNorm, Rational, TreeNode, TreeVector};
use num_bigint::BigUint;

fn node(p: &[u64]) -> TreeNode {
    TreeNode::from(p)
}

fn cherry() -> TreeVector {
    let t = Arc::new(make_tree([vec![0u64], vec![1]]));
    TreeVector::from_entries(t, [(TreeNode::root(), int(1)), (node(&[0]), int(2)), (node(&[1]), int(3))]).unwrap()
}

#[test]
fn segment_base_norms() {
    let t = chain_tree(2).unwrap();
    let tree = Arc::new(t.clone());
    let seg = Segment::new(&t, [TreeNode::root(), node(&[0])]).unwrap();
    let x = TreeVector::from_entries(tree.clone(), [(TreeNode::root(), int(1)), (node(&[0]), int(2))]).unwrap();
    assert_eq!(base_norm_of_segment(&x, &seg, &BaseNorm::l1()).unwrap().exact, Some(int(3)));
    assert_eq!(base_norm_of_segment(&x, &seg, &BaseNorm::Sup).unwrap().exact, Some(int(2)));
    let y = TreeVector::from_entries(tree, [(TreeNode::root(), int(3)), (node(&[0]), int(4))]).unwrap();
    let v = base_norm_of_segment(&y, &seg, &BaseNorm::lq(int(2)).unwrap()).unwrap();
    assert!(v.contains(&int(5)));
    assert!(v.upper.clone() - v.lower.clone() <= int(5) / Rational::from_integer(BigUint::from(1u64 << 40).into()));
}

#[test]
fn cherry_baire_values() {
    let x = cherry();
    let one = baire_norm_with_witness(&x, &BaireParams::with_p(1, BaseNorm::l1()).unwrap()).unwrap();
    assert_eq!(one.value.exact, Some(int(5)));
    let zero = baire_norm_with_witness(&x, &BaireParams::zero(BaseNorm::l1())).unwrap();
    assert_eq!(zero.value.exact, Some(int(4)));
    assert_eq!(zero.family.len(), 1);
    assert_eq!(zero.family[0].nodes(), &[TreeNode::root(), node(&[1])]);
}

#[test]
fn frozen_oracle_values() {
    // values produced by the brute-force oracle
    let t = Arc::new(make_tree([vec![0u64, 0], vec![0, 1], vec![1, 0]]));
    let x = TreeVector::from_entries(
        t,
        [
            (TreeNode::root(), int(1)),
            (node(&[0]), int(2)),
            (node(&[0, 1]), rat(-3, 2)),
            (node(&[1, 0]), int(3)),
        ],
    )
    .unwrap();
    let cases = [
        (BaireParams::zero(BaseNorm::l1()), rat(9, 2)),
        (BaireParams::with_p(1, BaseNorm::l1()).unwrap(), rat(13, 2)),
        (BaireParams::new(Exponent::P(int(1)), BaseNorm::Sup), int(5)),
    ];
    for (params, expected) in cases {
        assert_eq!(baire_norm(&x, &params).unwrap().exact, Some(expected.clone()));
        assert_eq!(baire_norm_oracle(&x, &params, 12).unwrap().value.exact, Some(expected));
    }
    // p = 2: (7/2)^2 + 3^2 = 85/4
    let r = baire_norm_with_witness(&x, &BaireParams::with_p(2, BaseNorm::l1()).unwrap()).unwrap();
    assert_eq!(r.power_sum.unwrap().exact, Some(rat(85, 4)));
}

#[test]
fn unit_block_profiles() {
    let t = Arc::new(star_tree(5, 0).unwrap());
    let blocks: Vec<TreeVector> = (0..5).map(|i| TreeVector::unit(t.clone(), node(&[i])).unwrap()).collect();
    let ones = vec![int(1); 5];
    let p1 = incomparable_block_profile(&blocks, &ones, &BaireParams::with_p(1, BaseNorm::l1()).unwrap()).unwrap();
    assert_eq!((p1.combined.exact, p1.profile.exact, p1.ratio.exact), (Some(int(5)), Some(int(5)), Some(int(1))));
    let p0 = incomparable_block_profile(&blocks, &ones, &BaireParams::zero(BaseNorm::l1())).unwrap();
    assert_eq!(p0.combined.exact, Some(int(1)));
    let single = incomparable_block_profile(&blocks[..1], &[int(1)], &BaireParams::with_p(2, BaseNorm::l1()).unwrap()).unwrap();
    assert!(single.ratio.contains(&int(1)));
}

#[test]
fn tsirelson_worked_values() {
    let t = Arc::new(star_tree(4, 4).unwrap());
    let ones = TreeVector::from_entries(t.clone(), (4..8).map(|i| (node(&[i]), int(1)))).unwrap();
    for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
        assert_eq!(tsirelson_norm(&ones, v).unwrap(), int(2));
        assert_eq!(tsirelson_iterate(&ones, v, 0).unwrap(), int(1));
    }
    let chain = Arc::new(chain_tree(6).unwrap());
    let c = TreeVector::from_entries(chain.clone(), chain.iter().enumerate().map(|(i, n)| (n.clone(), rat(i as i64 + 1, 3)))).unwrap();
    assert_eq!(tsirelson_norm(&c, TsirelsonVariant::Incomparable).unwrap(), int(2));
    let e = TreeVector::unit(t, node(&[5])).unwrap().scale(&rat(-7, 3));
    assert_eq!(tsirelson_norm(&e, TsirelsonVariant::Standard).unwrap(), rat(7, 3));
}

#[test]
fn identity_block_sequence() {
    let t = Arc::new(star_tree(4, 4).unwrap());
    let units: Vec<TreeVector> = (4..8).map(|i| TreeVector::unit(t.clone(), node(&[i])).unwrap()).collect();
    let seq = FiniteBlockSequence::tight(units).unwrap();
    let coeffs = [int(1), rat(-1, 2), int(1), rat(2, 3)];
    let s = verify_sandwich18(&t, &seq, &coeffs).unwrap();
    assert!(s.holds());
    assert_eq!(s.index_standard, s.block_incomparable);
    assert_eq!(s.block_incomparable, s.block_standard);
    let zero = verify_block_domination(&t, &seq, &vec![int(0); 4]).unwrap();
    assert_eq!((zero.index_norm, zero.block_norm), (int(0), int(0)));
    let one = FiniteBlockSequence::tight(vec![TreeVector::unit(t.clone(), node(&[6])).unwrap()]).unwrap();
    let l = verify_block_domination(&t, &one, &[rat(3, 5)]).unwrap();
    assert_eq!(l.index_norm, l.block_norm);
}

#[test]
fn ground_and_norming_set_values() {
    let t = Arc::new(make_tree([vec![0u64, 0], vec![1]]));
    let x = TreeVector::from_entries(t, [(node(&[0]), int(1)), (node(&[0, 0]), int(1)), (node(&[1]), int(-1))]).unwrap();
    assert_eq!(ground_norm(&x).unwrap(), int(2));
    assert_eq!(baire_norm(&x, &BaireParams::zero(BaseNorm::l1())).unwrap().exact, Some(int(2)));

    let star = Arc::new(star_tree(4, 4).unwrap());
    let u = TreeVector::from_entries(star, (4..8).map(|i| (node(&[i]), int(1)))).unwrap();
    assert_eq!(ground_norm(&u).unwrap(), int(1));
    assert_eq!(dg_lower_bound(&u, 0, &[OpPair::new(2, 4)]).unwrap().value, int(1));
    assert_eq!(dg_lower_bound(&u, 1, &[OpPair::new(2, 4)]).unwrap().value, int(2));
    assert_eq!(dg_upper_bound(&u), int(4));
}

#[test]
fn schedule_values() {
    let s = schedule(3).unwrap();
    assert_eq!(s.m[1], BigUint::from(32u32));
    assert_eq!(s.m[2], BigUint::from(33_554_432u64));
    assert_eq!(s.s[0], 15);
    assert_eq!(s.n[1].to_string(), "32768000000000000000");
}

#[test]
fn ranks() {
    assert_eq!(rank(&chain_tree(5).unwrap()).unwrap(), 4);
    assert_eq!(rank(&star_tree(3, 0).unwrap()).unwrap(), 1);
    assert_eq!(rank(&make_tree([Vec::<u64>::new()])).unwrap(), 0);
}

#[test]
fn star_equivalence_at_ones() {
    let t = Arc::new(star_tree(6, 6).unwrap());
    let units = FiniteBlockSequence::tight((6..12).map(|i| TreeVector::unit(t.clone(), node(&[i])).unwrap()).collect()).unwrap();
    let tsi = NormContext::new(NormKind::Tsirelson(TsirelsonVariant::Incomparable), t.clone()).unwrap();
    let ground = NormContext::new(NormKind::Ground, t).unwrap();
    let k = equivalence_ratio_bounds(&units, &tsi, &units, &ground, 8, 1).unwrap();
    // all ones: Tsirelson 3, ground 1
    assert!(k.lower >= int(3));
}
