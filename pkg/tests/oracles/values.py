"""Frozen mpmath reference values; see generate.py."""

BESSEL_K = {
    (0.0, 0.1): 2.4270690247020166,
    (0.0, 1.0): 0.42102443824070833,
    (0.5, 2.0): 0.11993777196806145,
    (1.0, 0.001): 999.99623815608555,
    (1.0, 5.0): 0.0040446134454521642,
    (2.5, 0.7): 8.486341592801385,
    (0.3, 30.0): 2.1356270283260949e-14,
    (7.25, 3.0): 21.554441026313753,
    (0.999, 1.5): 0.27724536760790473,
    (1e-06, 0.5): 0.92441907122823117,
}

GAMMA = {
    0.1: 9.5135076986687313,
    0.5: 1.772453850905516,
    1.0: 1.0,
    2.5: 1.329340388179137,
    7.3: 1271.4236336639088,
    30.0: 8.841761993739702e+30,
    -0.5: -3.5449077018110321,
    -1.5: 2.3632718012073547,
}

# (n, alpha, lambda, r) -> kernel by heat-kernel subordination
BESSEL_KERNEL = {
    (1, 0.3, 1.0, 0.5): 0.23572643165189815,
    (1, 1.0, 2.0, 1.0): 0.085954745769180946,
    (2, 0.7, 0.25, 2.0): 0.043329440234341488,
    (2, 1.0, 1.0, 0.1): 0.38628003250655135,
    (3, 0.5, 4.0, 1.0): 0.01417137669682938,
    (3, 1.0, 1.0, 3.0): 0.0013206430054666147,
    (3, 1.5, 0.5, 0.001): 0.3733818059814845,
    (2, 1.5, 1.0, 10.0): 7.2256232377243219e-6,
}

# (alpha, beta, lambda, d) -> one-dimensional convolution integral of two kernels
CONVOLUTION_1D = {
    (0.3, 0.7, 1.0, 1.0): 0.18393972058572114,
    (1.0, 1.0, 0.25, 2.0): 1.4715177646857693,
    (0.5, 1.5, 4.0, 0.5): 0.022992465073215148,
}

# radial L1 integral of the kernel, n=3, alpha=0.4, lambda=2
L1_N3 = 0.75785828325519904
RIESZ_N3_HALF = 0.050660591821168886
