use realembed::network::{
    bell_chsh, bilocal, chsh_value, embed_network, triangle, verify_equivalence,
};

#[test]
fn chsh_matches_in_both_theories() {
    let qt = bell_chsh();
    let (real, cert) = embed_network(&qt, 1e-9).unwrap();
    assert!(cert.joint_independence.is_none());
    let sq = chsh_value(&qt).unwrap();
    let sr = chsh_value(&real).unwrap();
    let tsirelson = 2.0 * 2f64.sqrt();
    assert!((sq - tsirelson).abs() <= 1e-9, "{sq}");
    assert!((sr - tsirelson).abs() <= 1e-9, "{sr}");
    let report = verify_equivalence(&qt, &real, 1e-10).unwrap();
    assert!(report.passes, "{}", report.max_deviation);
}

#[test]
fn bilocal_embedding_is_equivalent_and_independent() {
    let qt = bilocal();
    let (real, cert) = embed_network(&qt, 1e-9).unwrap();
    assert_eq!(
        real.parties.iter().map(|p| p.dim).collect::<Vec<_>>(),
        vec![4, 16, 4]
    );
    let joint = cert.joint_independence.as_ref().unwrap();
    assert!(joint.operational, "{joint:?}");
    // the embedded joint state correlates the two sources' phase factors
    assert!(!joint.product_state);
    let fold = cert.r_product_fold_deviation.unwrap();
    assert!(fold <= 1e-12, "{fold}");
    let report = verify_equivalence(&qt, &real, 1e-10).unwrap();
    assert!(report.passes, "{}", report.max_deviation);
    assert_eq!(report.per_setting.len(), 8);
}

#[test]
fn triangle_embedding_is_equivalent() {
    let qt = triangle();
    let (real, cert) = embed_network(&qt, 1e-9).unwrap();
    assert!(cert.joint_independence.as_ref().unwrap().operational);
    assert_eq!(cert.per_source_independence.len(), 3);
    assert!(cert.per_source_independence.values().all(|v| v.operational));
    let report = verify_equivalence(&qt, &real, 1e-10).unwrap();
    assert!(report.passes, "{}", report.max_deviation);
}
