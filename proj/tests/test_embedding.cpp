#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "helpers.hpp"
#include "nojd/embedding.hpp"
#include "nojd/io.hpp"
#include "nojd/rng.hpp"

using namespace nojd;

TEST_CASE("hermitian split reconstructs the input and is Hermitian") {
    const TargetSet set = testutil::random_instance(11, 4, 3);
    const HermitianSet split = hermitian_split(set);
    split.validate();
    REQUIRE(split.mats.size() == 6);
    for (int k = 0; k < set.k; ++k) {
        const MatC rebuilt =
            split.mats[2 * k + 1].to_complex() + Cx(0, 1) * split.mats[2 * k].to_complex();
        const double scale = set.matrices[k].norm();
        REQUIRE((rebuilt - set.matrices[k]).norm() <= 1e-15 * scale);
        REQUIRE(split.mats[2 * k].hermiticity_error() <= 1e-15);
        REQUIRE(split.mats[2 * k + 1].hermiticity_error() <= 1e-15);
    }
}

TEST_CASE("split halves diagonalize to the split diagonals") {
    const TargetSet set = testutil::random_instance(12, 5, 2);
    const HermitianSet split = hermitian_split(set);
    const MatC& a = set.truth->mixing;
    for (int k = 0; k < set.k; ++k) {
        const VecC& d = set.truth->diagonals[k];
        const MatC herm = a * d.real().cast<Cx>().asDiagonal() * a.adjoint();
        const MatC skew = a * d.imag().cast<Cx>().asDiagonal() * a.adjoint();
        const double scale = set.matrices[k].norm();
        REQUIRE((split.mats[2 * k + 1].to_complex() - herm).norm() <= 1e-13 * scale);
        REQUIRE((split.mats[2 * k].to_complex() - skew).norm() <= 1e-13 * scale);
    }
}

TEST_CASE("block embedding is a ring homomorphism") {
    Rng rng(21);
    const MatC g = rng.complex_normal_matrix(5, 5);
    const MatC h = rng.complex_normal_matrix(5, 5);

    const MatR fg = block_embed(g), fh = block_embed(h);
    REQUIRE((block_embed(MatC(g * h)) - fg * fh).cwiseAbs().maxCoeff() <= 1e-13);
    // Sum and adjoint commute with the embedding without arithmetic error.
    REQUIRE((block_embed(MatC(g + h)) - (fg + fh)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((block_embed(MatC(g.adjoint())) - fg.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("real embedding of a Hermitian matrix is symmetric and round trips") {
    Rng rng(22);
    const MatC raw = rng.complex_normal_matrix(4, 4);
    const MatC herm = (raw + raw.adjoint()) / 2.0;

    const MatR embedded = real_embed(herm);
    REQUIRE((embedded - embedded.transpose()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(block_structure_error(embedded) == 0.0);
    REQUIRE((real_unembed(embedded) - herm).cwiseAbs().maxCoeff() == 0.0);

    REQUIRE_THROWS_AS(real_embed(raw), std::invalid_argument);
}

TEST_CASE("unembedding rejects broken block structure") {
    Rng rng(23);
    const MatC raw = rng.complex_normal_matrix(3, 3);
    MatR embedded = real_embed(MatC((raw + raw.adjoint()) / 2.0));
    embedded(0, 0) += 0.5;  // top-left no longer mirrors bottom-right
    REQUIRE(block_structure_error(embedded) > 1e-3);
    REQUIRE_THROWS_AS(real_unembed(embedded), std::invalid_argument);
}

TEST_CASE("embedded set of a split target validates") {
    const RealEmbeddedSet embedded = testutil::random_embedded(24, 3, 4);
    embedded.validate();
    REQUIRE(embedded.real_dim() == 6);
    REQUIRE(embedded.mats.size() == 8);
    for (const auto& m : embedded.mats) {
        REQUIRE(block_structure_error(m) == 0.0);
        REQUIRE((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("matrix set files round trip bitwise") {
    const TargetSet set = testutil::random_instance(25, 3, 2);

    std::stringstream buf;
    write_matrix_set(buf, set);
    const TargetSet back = read_matrix_set(buf);

    REQUIRE(back.n == set.n);
    REQUIRE(back.k == set.k);
    for (int k = 0; k < set.k; ++k) REQUIRE(back.matrices[k] == set.matrices[k]);
    REQUIRE(back.truth.has_value());
    REQUIRE(back.truth->mixing == set.truth->mixing);
    for (int k = 0; k < set.k; ++k) REQUIRE(back.truth->diagonals[k] == set.truth->diagonals[k]);
}

TEST_CASE("matrix set files without truth round trip") {
    TargetSet set = testutil::random_instance(26, 2, 1);
    set.truth.reset();

    std::stringstream buf;
    write_matrix_set(buf, set);
    const TargetSet back = read_matrix_set(buf);
    REQUIRE_FALSE(back.truth.has_value());
    REQUIRE(back.matrices[0] == set.matrices[0]);
}

TEST_CASE("matrix set reader rejects malformed input") {
    std::stringstream bad_header("NOJD v2 2 1\n");
    REQUIRE_THROWS_AS(read_matrix_set(bad_header), std::runtime_error);

    std::stringstream truncated("NOJD v1 2 1\n1 0 0 0\n");
    REQUIRE_THROWS_AS(read_matrix_set(truncated), std::runtime_error);
}
