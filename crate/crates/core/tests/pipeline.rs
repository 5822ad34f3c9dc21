use omnicorr::{
    build_omnibus, expected_omnibus, induced_correlation, omni_embed, procrustes, sample_forward, sample_latent,
    CoefficientsF64, CorrelationSpecF64, EmbeddingF64, MatrixF64, MixtureF64, ReplicateStreams,
};

fn mixture() -> MixtureF64 {
    MixtureF64::from_rows(&[[0.8, 0.1], [0.2, 0.6]], &[0.5, 0.5]).unwrap()
}

#[test]
fn expected_omnibus_is_kron_of_p() {
    let streams = ReplicateStreams::new(3, 0);
    let latent = sample_latent(&mixture(), 40, &mut streams.latent());
    let p = latent.probability_matrix();
    for c in [
        CoefficientsF64::classical(3).unwrap(),
        CoefficientsF64::dampened(&[1.0, 2.0, 3.0]).unwrap(),
        CoefficientsF64::forward(3).unwrap(),
    ] {
        let e = expected_omnibus(&c, &p).unwrap();
        let kron = MatrixF64::filled(3, 3, 1.0).kron(p.matrix());
        assert!(e.matrix().sub(&kron).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn omnibus_embedding_recovers_latent_positions() {
    let n = 200;
    let streams = ReplicateStreams::new(11, 0);
    let latent = sample_latent(&mixture(), n, &mut streams.latent());
    let graphs = sample_forward(&latent, &[0.5, 0.5], &streams).unwrap();
    let c = CoefficientsF64::classical(3).unwrap();
    let omni = build_omnibus(&c, &graphs.matrices()).unwrap();
    let blocks = omni_embed(&omni, 2, 3).unwrap();
    let x = EmbeddingF64::new(latent.x().clone()).unwrap();
    for s in 0..3 {
        let block = blocks.block(s);
        let w = procrustes(&block, &x).unwrap();
        let aligned = block.rotate(&w).unwrap();
        let err = aligned.coords().sub(x.coords()).unwrap().two_to_infinity_norm();
        assert!(err < 0.25, "block {s}: 2→∞ error {err}");
    }
}

#[test]
fn classical_correlation_splits_into_method_and_model() {
    let c = CoefficientsF64::classical(4).unwrap();
    let r = CorrelationSpecF64::constant(4, 0.4).unwrap();
    let rho = induced_correlation(&c.alpha_weights(), &r, 1, 3).unwrap();
    assert!((rho.method - 0.75).abs() < 1e-12);
    assert!((rho.model - 0.1).abs() < 1e-12);
    assert!((rho.total - rho.method - rho.model).abs() < 1e-15);
}
