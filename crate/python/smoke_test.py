"""Smoke test for the cvmbqc_py extension module."""

import json
import math

import cvmbqc_py as cv


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    v = cv.db_to_variance(8.3)
    assert close(v, 0.25 * 10 ** (-0.83))
    assert close(cv.variance_to_db(v), 8.3, 1e-12)

    rows = cv.spectrum([0.0, 1.0, 1e6], 1.0)
    assert rows[0][1] == 0.0
    assert close(rows[1][1], 0.125)
    assert close(cv.spectrum_oracle(1.0, 1.0), 0.125, 1e-6)

    s, ent = cv.vlf_two_node(0.05)
    assert ent and close(s, 0.2)
    s, ent = cv.vlf_two_node(0.25)
    assert not ent

    g = cv.ClusterGraph.chain(4)
    assert g.n_nodes == 4 and len(g.edges()) == 3
    degrees = [1, 2, 2, 1]
    assert all(close(x, (1 + d) * 0.05) for x, d in zip(g.nullifier_variances(0.05), degrees))

    identity = cv.gate_matrix(0.0, math.pi / 2)
    assert all(close(identity[i][j], float(i == j)) for i in range(2) for j in range(2))

    first, second, residual = cv.solve_phases([[1.0, 0.0], [1.0, 1.0]])
    assert residual < 1e-10
    m2, m1 = second.gate_matrix(), first.gate_matrix()
    prod = [[sum(m2[i][k] * m1[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert all(close(prod[i][j], [[1, 0], [1, 1]][i][j], 1e-9) for i in range(2) for j in range(2))

    setting = cv.HomodyneSetting(math.pi / 4, -math.pi / 4)
    total, signal, noise = cv.single_step_covariance(setting, 0.01)
    assert close(signal[0][0], 0.25) and close(noise[0][0], 0.02) and close(total[1][1], 0.27)

    cz = cv.cz_transform()
    assert cz == cv.cz_matrix()

    lhs, ent = cv.delayed_vlf(1.0, 2 * math.pi, 0.05, 1.25)
    assert ent and close(lhs, 0.2)

    record = json.loads(cv.run("cluster-check"))
    assert record["kind"] == "cluster-check"
    assert all(v["passed"] for v in record["verdicts"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
