"""Exact-arithmetic engine for the online Rota basis game.

Submodules: gf (prime-field linear algebra), extalg (exterior powers in
subset coordinates), latin (signed Latin-square censuses, the combinatorial
oracle), certificate (the chain of multilinear forms behind the safe
strategy), strategy (online strategies), adversary (the odd-dimension
construction), game (referee, transcripts, Hall analyzer, dealers).
"""

from .gf import FieldSpec, find_game_prime, root_of_unity
from .extalg import KVector, pure, unit, wedge
from .latin import census_signed, census_signed_fixed_diagonal, signed_completions, square_sign
from .certificate import (
    CertificateChain,
    CertificateForm,
    build_chain,
    build_fixed_diagonal_chain,
    check_chain,
    coefficient,
    evaluate,
    find_good_permutation,
    load_chain,
    save_chain,
)
from .strategy import (
    CertificateStrategy,
    CommonVectorStrategy,
    MatchingStrategy,
    RandomValidStrategy,
    SeededCertificateStrategy,
    common_vector_play,
    seeded_init,
)
from .adversary import AdversaryDealer, run_adversary
from .game import (
    CommonVectorDealer,
    HallReport,
    RandomDealer,
    ScriptedDealer,
    StandardDealer,
    Transcript,
    hall_report,
    play,
    verify_transcript,
)
from .rng import SplitMix64

__version__ = "0.1.0"
