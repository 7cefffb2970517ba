// Runs the fast crate examples as tests.

mod ambient_geometry {
    include!("../examples/ambient_geometry.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod admissible_domains {
    include!("../examples/admissible_domains.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod comparison_principle {
    include!("../examples/comparison_principle.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod flux_identities {
    include!("../examples/flux_identities.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod scherk {
    include!("../examples/scherk.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}
