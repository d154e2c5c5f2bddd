"""Single registry of the identity each verification entry checks.

Both the CLI reports and the test-suite look anchors up here, so a check is
always labelled by the same statement wherever it runs.
"""

ANCHORS = {
    # symbolic kernel
    "kernel.ccr": "[X_j, P_k] = i hbar delta_jk I",
    "kernel.spin": "[S_j, S_k] = i hbar eps_jkl S_l",
    "kernel.grassmann": "th^a th^b + th^b th^a = 0",
    "kernel.pb": "{A, B} = (-i hbar)^-1 [A, B]",
    "kernel.jacobi": "graded Jacobi identity on generator triples",
    "kernel.star": "(AB)* = B* A*",
    # Galilean structure
    "galilei.pb": "extended Galilei brackets: {J_i,J_j}=-eps J_k, {J_i,K_j}=-eps K_k, {J_i,P_j}=-eps P_k, "
    "{K_i,H}=-P_i, {K_i,P_j}=-delta_ij M, all others 0",
    "galilei.casimir.c1": "{2MH - P^2, h_a} = 0",
    "galilei.casimir.c2": "{(MJ - K x P)^2, h_a} = 0",
    "galilei.casimir.b": "{J_j,B_k}=-eps_jkl B_l; {K_j,B_k}={P_j,B_k}={H,B_k}=0, B = MJ - K x P",
    "galilei.position": "X = K/m: {X_j,X_k}=0, {P_j,X_k}=delta_jk I, {J_j,X_k}=-eps_jkl X_l",
    "galilei.spin": "S = J - X x P: {S_i,S_j}=-eps_ijk S_k, {S_i,X_j}=0={S_i,P_j}",
    "galilei.c2_spin": "C_2 = m^2 S^2",
    "galilei.internal_energy": "U = C_1/2m = H - P^2/2m",
    "galilei.free_particle": "H = P^2/2m: {H,P_j} = 0 = {H,J_j}",
    # states and representations
    "gns.state": "phi(I) = 1 and phi(A*A) >= 0",
    "gns.reconstruction": "(chi, pi(A) chi) = phi(A)",
    "gns.homomorphism": "pi(AB) = pi(A)pi(B), pi(A*) = pi(A)^dagger",
    "gns.purity": "GNS representation irreducible iff state pure",
    "gns.vector_state": "phi_B(A) = phi(B*AB)/phi(B*B), pure and unitarily related",
    "gns.faithful": "direct sum over pure states is faithful",
    "gns.superselection": "H = sum of coherent sectors, Q = sum a_alpha P_alpha central",
    "gns.transition": "w_12 = Tr(rho_1 rho_2) = p(E) for the POVM |chi_r><chi_r|",
    # Grassmann states
    "grassmann.normalization": "phi(1) = integral of rho = 1",
    "grassmann.positivity": "integral of f f* rho >= 0",
    "grassmann.uniqueness": "G_3 admits the single state rho = th3 th2 th1",
    "grassmann.cc": "observables with equal expectations in every pure state",
    # dynamics
    "dynamics.heisenberg": "dA/dt = (-i hbar)^-1 [H, A]",
    "dynamics.noether.J": "Noether invariant J",
    "dynamics.noether.P": "Noether invariant P",
    "dynamics.noether.K": "Noether invariant m X - P t",
    "dynamics.noether.H": "Noether invariant -H",
    "dynamics.noether.M": "Noether invariant M = m I",
    "dynamics.schrodinger": "i hbar dpsi/dt = [-(hbar^2/2m) d^2/dx^2 + V(X)] psi",
    "dynamics.localization": "P(D) = int_D |x><x| dx; prob = int_D |psi|^2 dx",
    "dynamics.pobvm.additivity": "P(union D_i) = sum P(D_i) for disjoint D_i",
    "dynamics.pobvm.covariance": "U(a) P(D) U(a)^-1 = P(D + a)",
    "dynamics.weyl.U": "U(a)U(b) = U(a+b)",
    "dynamics.weyl.V": "V(a)V(b) = V(a+b)",
    "dynamics.weyl.UV": "U(a)V(b) = exp(i a b) V(b)U(a)",
    "dynamics.weyl.inverse": "U(a)U(-a) = I",
    # phase space
    "wwm.wigner": "W(x,p) = int exp(-i p y/hbar) psi(x+y/2) psi*(x-y/2) dy",
    "wwm.symbol": "A_W(x,p) = int exp(-i p y/hbar) K_A(x+y/2, x-y/2) dy",
    "wwm.born": "(psi, A psi) = int int A_W W dx dp",
    "wwm.calibration": "x * p - p * x = i hbar",
    "wwm.moyal": "{f,g}_M = (-i hbar)^-1 (f*g - g*f)",
    "wwm.semiclassical": "f * g = fg - (i hbar/2){f,g}_cl + O(hbar^2)",
    "wwm.classical_limit": "Moyal evolution -> Liouville transport as hbar -> 0",
}


def anchor(key: str) -> str:
    return ANCHORS[key]
