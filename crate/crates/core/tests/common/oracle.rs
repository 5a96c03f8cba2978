#![allow(clippy::approx_constant)]

// Reference values from mpmath 1.3.0 at 40 significant digits.
// Rows: (re z, im z, re gamma, im gamma, re loggamma, im loggamma).
pub const GAMMA_ORACLE: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.5, 0.0, 1.772453850905516, 0.0, 0.5723649429247001, 0.0),
    (1.0, 0.0, 1.0, 0.0, 0.0, 0.0),
    (3.7, 0.0, 4.170651783796604, 0.0, 1.428072326665388, 0.0),
    (
        -2.5,
        0.0,
        -0.9453087204829419,
        0.0,
        -0.056243716497674054,
        -9.42477796076938,
    ),
    (
        -0.3,
        0.0,
        -4.326851108825193,
        0.0,
        1.4648400508576025,
        -3.141592653589793,
    ),
    (0.001, 0.0, 999.4237724845955, 0.0, 6.907178885383853, 0.0),
    (
        0.2,
        0.3,
        1.1707421186241773,
        -2.1041380778637433,
        0.8787594610013817,
        -1.0630528824564223,
    ),
    (
        1.3,
        0.7,
        0.6926573040806141,
        -0.04025594616115674,
        -0.36553390021897025,
        -0.0580528252038755,
    ),
    (
        2.0,
        -1.5,
        0.35793625059451933,
        -0.38349289213875803,
        -0.6451555533757911,
        -0.819853953767206,
    ),
    (
        -1.5,
        2.5,
        -0.003970857806963142,
        0.005327273337225862,
        -5.0139865293323576,
        -4.071849447747497,
    ),
    (
        -3.2,
        0.4,
        0.04356088470635085,
        0.23686713340250093,
        -1.4236251906691908,
        -11.177446407273084,
    ),
    (
        -7.6,
        -1.1,
        -5.042253155646476e-06,
        -1.1269003044686265e-05,
        -11.302207857750824,
        23.141218183275914,
    ),
    (
        0.0,
        1.0,
        -0.15494982830181067,
        -0.49801566811835607,
        -0.6509231993018564,
        -1.8724366472624299,
    ),
    (
        0.0,
        -2.0,
        0.00990244008092749,
        0.07595200133501807,
        -2.569225966990875,
        1.4411500104851083,
    ),
    (
        0.0,
        5.0,
        -0.00027170388350615055,
        0.00033993289887213594,
        -7.739762056986849,
        2.2451022478200278,
    ),
    (
        0.5,
        10.0,
        3.378724376234236e-07,
        1.689369839038919e-07,
        -14.789024734744293,
        13.03002003491109,
    ),
    (
        10.0,
        10.0,
        1423.851941789183,
        -3496.0819733079447,
        8.236131750448719,
        23.948703413782038,
    ),
    (
        -10.5,
        0.5,
        -3.863233127384094e-08,
        -9.916007195431364e-08,
        -16.05587405213481,
        -33.35822790833775,
    ),
    (
        25.0,
        -3.0,
        -5.083447475387392e+23,
        9.193087030840865e+22,
        54.601537298835595,
        -9.603687858313199,
    ),
    (
        -0.9,
        -0.01,
        -10.47145457324001,
        -0.9744998491014073,
        2.3529646143031973,
        3.2343878913575677,
    ),
    (
        4.0,
        0.001,
        5.999994415037607,
        0.007536703039143751,
        1.791759327316579,
        0.0012561176817717555,
    ),
    (
        0.1,
        20.0,
        -2.4907424588333927e-16,
        1.7174149756817257e-14,
        -31.695265907346563,
        39.28441001064936,
    ),
    (
        -20.3,
        7.0,
        9.313799255706083e-28,
        9.610671795213583e-30,
        -62.24083227705463,
        -43.97197877163458,
    ),
    (
        60.0,
        40.0,
        -4.408340545932352e+74,
        1.8152589198568308e+74,
        171.9531095921287,
        166.11379198409955,
    ),
    (
        0.7,
        -0.7,
        0.6256768468539003,
        0.4347793283330394,
        -0.27192879317128377,
        0.6072911525157908,
    ),
];
