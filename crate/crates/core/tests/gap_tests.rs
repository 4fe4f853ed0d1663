mod common;

use common::{approx_ctx, assert_close, assert_same, dec, exact_ctx, rat, BITS};
use gaplab::{
    circle_gaps, classify_gaps, cosine, gap_report, orbit, sawtooth, shifted_cosine,
    two_orbit_circle_gaps, Error, GapKind, Mode, PeriodicFn, Piece, PiecewiseLinearPeriodic,
    Scalar,
};

fn two_branch() -> PeriodicFn {
    PeriodicFn::Pl(
        PiecewiseLinearPeriodic::new(
            Scalar::one(),
            vec![
                Piece::new(rat("0"), rat("3/4"), rat("1"), rat("1")),
                Piece::new(rat("3/4"), rat("1"), rat("1"), rat("-1/2")),
            ],
        )
        .unwrap(),
    )
}

fn kinked(epsilon: &str) -> PeriodicFn {
    let e = rat(epsilon);
    let slope = Scalar::one().add(&e);
    let intercept = slope.neg().div(&Scalar::from_int(2));
    PeriodicFn::Pl(
        PiecewiseLinearPeriodic::new(
            Scalar::one(),
            vec![
                Piece::new(rat("0"), rat("1/2"), rat("1"), rat("0")).closed(),
                Piece::new(rat("1/2"), rat("1"), slope, intercept),
            ],
        )
        .unwrap(),
    )
}

#[test]
fn orbit_sampling() {
    let saw = sawtooth();
    let samples = orbit(&saw, &rat("1/4"), &rat("0"), 3, BITS).unwrap();
    assert_eq!(samples.len(), 3);
    for (i, expect) in ["1/4", "1/2", "3/4"].iter().enumerate() {
        assert_eq!(samples[i].d, i as u64 + 1);
        assert_eq!(samples[i].piece_index, Some(1));
        assert_same(&samples[i].value, &rat(expect));
        assert_same(&samples[i].x_reduced, &rat(expect));
    }

    // The kink at 1/2 splits the samples between the two pieces.
    let f = kinked("1/4");
    let samples = orbit(&f, &rat("1/10"), &rat("0"), 10, BITS).unwrap();
    for s in &samples {
        let expect = if s.d >= 6 && s.d <= 9 { Some(2) } else { Some(1) };
        assert_eq!(s.piece_index, expect, "d = {}", s.d);
    }
    assert_same(&samples[4].value, &rat("1/2"));
    assert_same(&samples[8].value, &rat("1/2"));
    assert_same(&samples[9].value, &rat("0"));

    let cos = cosine(BITS);
    let samples = orbit(&cos, &rat("1/4"), &rat("0"), 3, BITS).unwrap();
    assert_eq!(samples[0].piece_index, None);
    assert_close(
        &samples[0].value,
        "0.968912421710644784144595449494189199804134190",
        "1e-40",
    );
    assert_close(
        &samples[1].value,
        "0.877582561890372716116281582603829651991645197",
        "1e-40",
    );
    assert_close(
        &samples[2].value,
        "0.731688868873820886311838753000084543840541276",
        "1e-40",
    );

    assert!(matches!(
        orbit(&saw, &rat("1/4"), &rat("0"), 0, BITS).unwrap_err(),
        Error::InvalidArgument(_)
    ));
}

#[test]
fn sawtooth_report() {
    let report = gap_report(&sawtooth(), &rat("1/4"), &rat("0"), 3, &exact_ctx()).unwrap();
    assert_eq!(report.mode, Mode::Exact);
    assert_eq!(report.sorted_values.len(), 3);
    assert_eq!(report.entries.len(), 3);

    assert_same(&report.entries[0].length, &rat("1/4"));
    assert_same(&report.entries[1].length, &rat("1/4"));
    let ext = report.extremal_entry();
    assert_eq!(ext.kind, GapKind::Extremal);
    assert_same(&ext.length, &rat("1/2"));
    assert_same(&ext.lower_value, &rat("3/4"));
    assert_same(&ext.upper_value, &rat("1/4"));
    assert_eq!((ext.d_lower, ext.d_upper), (3, 1));

    assert_eq!(report.gap_set.len(), 2);
    assert_same(&report.gap_set[0], &rat("1/4"));
    assert_same(&report.gap_set[1], &rat("1/2"));
    assert_eq!(report.distinct_count(), 2);

    // The multiset telescopes to sup - inf.
    let total = report
        .gap_multiset
        .iter()
        .fold(Scalar::zero(), |acc, g| acc.add(g));
    assert_same(&total, &rat("1"));
}

#[test]
fn cosine_report_oracles() {
    let report = gap_report(&cosine(BITS), &rat("1/4"), &rat("0"), 3, &approx_ctx()).unwrap();
    assert_eq!(report.mode, Mode::Approx);
    // Values sort in reverse sampling order since cosine decreases on (0, 1].
    assert_close(
        &report.sorted_values[0],
        "0.731688868873820886311838753000084543840541276",
        "1e-40",
    );
    assert_close(
        &report.entries[0].length,
        "0.145893693016551829804442829603745108151103921",
        "1e-40",
    );
    assert_close(
        &report.entries[1].length,
        "0.0913298598202720680283138668903595478124889932",
        "1e-40",
    );
    assert_close(
        &report.extremal_entry().length,
        "1.76277644716317610216724330350589534403640709",
        "1e-40",
    );
    assert_eq!(report.distinct_count(), 3);
}

#[test]
fn sine_report_oracles() {
    let half_pi = Scalar::pi(BITS).div(&Scalar::from_int(2));
    let sine = shifted_cosine(&half_pi, BITS);
    let report = gap_report(&sine, &rat("1/4"), &rat("0"), 3, &approx_ctx()).unwrap();
    assert_close(
        &report.sorted_values[0],
        "0.247403959254522929596848704849389195893390980",
        "1e-40",
    );
    assert_close(
        &report.entries[0].length,
        "0.232021579349680070676439230366182192188412388",
        "1e-40",
    );
    assert_close(
        &report.entries[1].length,
        "0.202213221419131166459954017564322547256579027",
        "1e-40",
    );
    assert_close(
        &report.extremal_entry().length,
        "1.56576519923118876286360675206949526055500859",
        "1e-40",
    );
    assert_eq!(report.distinct_count(), 3);
}

#[test]
fn constant_orbit_degenerates() {
    let flat = PeriodicFn::Pl(
        PiecewiseLinearPeriodic::new(
            Scalar::one(),
            vec![Piece::new(rat("0"), rat("1"), rat("0"), rat("5"))],
        )
        .unwrap(),
    );
    let report = gap_report(&flat, &rat("1/7"), &rat("0"), 5, &exact_ctx()).unwrap();
    assert_eq!(report.sorted_values.len(), 1);
    assert_eq!(report.entries.len(), 1);
    assert!(report.extremal_entry().length.is_zero());
    assert_eq!(report.distinct_count(), 1);
}

#[test]
fn value_collisions_fold_piece_sets() {
    // d = 5 hits 1/2 on piece one, d = 9 hits 1/2 on piece two.
    let f = kinked("1/4");
    let report = gap_report(&f, &rat("1/10"), &rat("0"), 10, &exact_ctx()).unwrap();
    assert_eq!(report.sorted_values.len(), 9);
    let last = report.sorted_values.last().unwrap();
    assert_same(last, &rat("1/2"));
    let pieces = report.value_pieces.last().unwrap();
    assert_eq!(pieces.iter().copied().collect::<Vec<_>>(), vec![1, 2]);
    // The smallest d attaining the value wins the label.
    assert_eq!(report.entries[7].d_upper, 5);
}

#[test]
fn classification_interior_and_boundary() {
    let mut report = gap_report(&sawtooth(), &rat("1/4"), &rat("0"), 3, &exact_ctx()).unwrap();
    classify_gaps(&mut report, &sawtooth()).unwrap();
    assert_eq!(report.entries[0].kind, GapKind::Interior(1));
    assert_eq!(report.entries[1].kind, GapKind::Interior(1));
    assert_eq!(report.entries[2].kind, GapKind::Extremal);
}

#[test]
fn classification_two_branch_orbit() {
    let f = two_branch();
    let alpha = Scalar::pi(BITS).div(&Scalar::from_int(16));
    let mut report = gap_report(&f, &alpha, &rat("0"), 7, &approx_ctx()).unwrap();
    classify_gaps(&mut report, &f).unwrap();

    assert_eq!(report.sorted_values.len(), 7);
    assert_eq!(report.distinct_count(), 4);

    let kinds: Vec<&str> = report.entries.iter().map(|e| e.kind.label()).collect();
    assert_eq!(
        kinds,
        vec![
            "interior",
            "non_interior",
            "interior",
            "interior",
            "interior",
            "interior",
            "extremal"
        ]
    );
    assert_eq!(report.entries[0].kind, GapKind::Interior(2));
    assert_eq!(report.entries[2].kind, GapKind::Interior(1));

    // Gap lengths: alpha twice, alpha + 1/2, 1 - 5 alpha twice, 6 alpha - 1,
    // and the extremal gap collapses onto alpha.
    assert_close(
        &report.entries[1].length,
        "0.696349540849362077403915211454968930262323087",
        "1e-40",
    );
    assert_close(
        &report.entries[2].length,
        "0.0182522957531896129804239427251553486883845627",
        "1e-40",
    );
    assert_close(
        &report.entries[3].length,
        "0.178097245096172464423491268729813581573938525",
        "1e-40",
    );
    assert_close(
        &report.extremal_entry().length,
        "0.196349540849362077403915211454968930262323087",
        "1e-40",
    );
}

#[test]
fn classification_ladder_gaps() {
    // epsilon = 1/4, N = 10: rungs k epsilon / 10 for k = 1..3 sit between
    // the pieces; the k = 4 length also shows up inside piece one.
    let f = kinked("1/4");
    let mut report = gap_report(&f, &rat("1/10"), &rat("0"), 10, &exact_ctx()).unwrap();
    classify_gaps(&mut report, &f).unwrap();

    assert_eq!(report.distinct_count(), 5);
    let rungs = [rat("1/40"), rat("1/20"), rat("3/40")];
    for e in report.entries.iter().take(report.entries.len() - 1) {
        if rungs.iter().any(|r| r == &e.length) {
            assert_eq!(e.kind, GapKind::NonInterior, "length {}", e.length);
        }
        if e.length == rat("1/10") {
            assert_eq!(e.kind, GapKind::Interior(1), "length {}", e.length);
        }
    }
    assert_same(&report.extremal_entry().length, &rat("1/8"));
}

#[test]
fn classification_requires_pieces() {
    let cos = cosine(BITS);
    let mut report = gap_report(&cos, &rat("1/4"), &rat("0"), 3, &approx_ctx()).unwrap();
    let err = classify_gaps(&mut report, &cos).unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
}

#[test]
fn circle_gap_multisets() {
    let ctx = exact_ctx();
    let gaps = circle_gaps(&[rat("1/4"), rat("1/2"), rat("3/4")], &ctx).unwrap();
    assert_eq!(gaps.len(), 3);
    assert_same(&gaps[0], &rat("1/4"));
    assert_same(&gaps[1], &rat("1/4"));
    assert_same(&gaps[2], &rat("1/2"));

    let gaps = circle_gaps(&[rat("0")], &ctx).unwrap();
    assert_eq!(gaps.len(), 1);
    assert_same(&gaps[0], &rat("1"));

    // Duplicates collapse before differencing.
    let gaps = circle_gaps(&[rat("0"), rat("0"), rat("1/2")], &ctx).unwrap();
    assert_eq!(gaps.len(), 2);

    assert!(circle_gaps(&[], &ctx).is_err());
    assert!(circle_gaps(&[rat("1")], &ctx).is_err());
    assert!(circle_gaps(&[rat("-1/4")], &ctx).is_err());
}

#[test]
fn three_gap_shape_on_the_circle() {
    let ctx = approx_ctx();
    let alpha = Scalar::sqrt2(BITS);
    let points: Vec<Scalar> = (1..=20u64)
        .map(|d| Scalar::from_u64(d).mul(&alpha).frac())
        .collect();
    let mut sorted = points.clone();
    sorted.sort();
    let gaps = circle_gaps(&sorted, &ctx).unwrap();
    let mut lengths = gaps.clone();
    lengths.sort();
    let distinct = gaplab::cluster_distinct(&lengths, &ctx).unwrap();
    assert_eq!(distinct.len(), 3);
    // The largest length is the sum of the other two.
    let sum = distinct[0].add(&distinct[1]);
    assert!(sum.sub(&distinct[2]).abs() < dec("1e-60"));
}

#[test]
fn two_orbit_unions() {
    let ctx = approx_ctx();
    let gaps = two_orbit_circle_gaps(&Scalar::sqrt2(BITS), &rat("1/3"), 25, &ctx).unwrap();
    let mut lengths = gaps.clone();
    lengths.sort();
    let distinct = gaplab::cluster_distinct(&lengths, &ctx).unwrap();
    assert!(distinct.len() <= 5, "got {}", distinct.len());

    // A zero offset collapses the union onto a single orbit.
    let gaps = two_orbit_circle_gaps(&rat("1/5"), &rat("0"), 5, &exact_ctx()).unwrap();
    assert_eq!(gaps.len(), 5);
    for g in &gaps {
        assert_same(g, &rat("1/5"));
    }
}

#[test]
fn report_serialization_shape() {
    let mut report = gap_report(&sawtooth(), &rat("1/4"), &rat("0"), 3, &exact_ctx()).unwrap();
    classify_gaps(&mut report, &sawtooth()).unwrap();
    let v = serde_json::to_value(&report).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["values"].as_array().unwrap().len(), 3);
    assert_eq!(v["gaps"].as_array().unwrap().len(), 3);
    assert_eq!(v["gap_set"].as_array().unwrap().len(), 2);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["gaps"][0]["kind"], "interior");
    assert_eq!(v["gaps"][0]["piece"], 1);
    assert_eq!(v["gaps"][2]["kind"], "extremal");
    assert_eq!(v["gaps"][2]["piece"], serde_json::Value::Null);
    assert_eq!(v["gaps"][0]["length"]["rational"], "1/4");
    assert_eq!(v["ctx"]["equality_tolerance"], "0");

    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "d_range,lower,upper,length,kind");
    assert_eq!(lines.next().unwrap(), "1-2,1/4,1/2,1/4,interior(1)");
    assert_eq!(lines.next().unwrap(), "2-3,1/2,3/4,1/4,interior(1)");
    assert_eq!(lines.next().unwrap(), "3-1,3/4,1/4,1/2,extremal");
}

#[test]
fn reports_are_deterministic() {
    let alpha = Scalar::pi(BITS).div(&Scalar::from_int(16));
    let a = gap_report(&two_branch(), &alpha, &rat("0"), 7, &approx_ctx()).unwrap();
    let b = gap_report(&two_branch(), &alpha, &rat("0"), 7, &approx_ctx()).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn offsets_shift_the_orbit() {
    let report = gap_report(&sawtooth(), &rat("1/4"), &rat("1/8"), 3, &exact_ctx()).unwrap();
    assert_same(&report.sorted_values[0], &rat("3/8"));
    assert_same(&report.sorted_values[2], &rat("7/8"));
    // Offsets leave sawtooth gap lengths unchanged.
    assert_same(&report.gap_set[0], &rat("1/4"));
    assert_same(&report.gap_set[1], &rat("1/2"));
}
