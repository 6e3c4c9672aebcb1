# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the speed-space marches and the Euler stencil.

Same contracts as terrace._kernels_np; see that module for documentation.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def hj_march(double[::1] v, double[::1] vbuf, double[::1] rates,
             double ds, double d, double dtau, long steps):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef long k
    cdef double s, pm, pp, pstar, pcl, ham, hm, hp
    cdef double[::1] a = v
    cdef double[::1] b = vbuf
    cdef double[::1] tmp

    for k in range(steps):
        for i in range(1, n - 1):
            s = i * ds
            pm = (a[i] - a[i - 1]) / ds
            pp = (a[i + 1] - a[i]) / ds
            if pm <= pp:
                pstar = s / (2.0 * d)
                pcl = pstar
                if pcl < pm:
                    pcl = pm
                if pcl > pp:
                    pcl = pp
                ham = d * pcl * pcl - s * pcl
            else:
                hm = d * pm * pm - s * pm
                hp = d * pp * pp - s * pp
                ham = hm if hm > hp else hp
            pcl = a[i] + dtau * (-a[i] - ham - rates[i])
            b[i] = pcl if pcl > 0.0 else 0.0
        b[0] = a[0]
        b[n - 1] = a[n - 1]
        tmp = a
        a = b
        b = tmp
    if steps % 2 == 1:
        # result currently lives in vbuf
        for i in range(n):
            v[i] = vbuf[i]


def euler_march(double[::1] u1, double[::1] u2, double[::1] u3,
                double[::1] b1, double[::1] b2, double[::1] b3,
                double d1, double d3, double r1, double r3,
                double a12, double a13, double a21, double a23,
                double a31, double a32,
                double dt, double dx, long steps,
                bint act1, bint act2, bint act3):
    cdef Py_ssize_t n = u1.shape[0]
    cdef Py_ssize_t i
    cdef long k
    cdef double idx2 = 1.0 / (dx * dx)
    cdef double lap, left, right
    cdef double[::1] c1 = u1, c2 = u2, c3 = u3
    cdef double[::1] n1 = b1, n2 = b2, n3 = b3
    cdef double[::1] tmp

    for k in range(steps):
        if act1:
            for i in range(n):
                left = c1[i - 1] if i > 0 else c1[1]
                right = c1[i + 1] if i < n - 1 else c1[n - 2]
                lap = (left - 2.0 * c1[i] + right) * idx2
                n1[i] = c1[i] + dt * (
                    d1 * lap
                    + r1 * c1[i] * (1.0 - c1[i] - a12 * c2[i] - a13 * c3[i])
                )
        if act2:
            for i in range(n):
                left = c2[i - 1] if i > 0 else c2[1]
                right = c2[i + 1] if i < n - 1 else c2[n - 2]
                lap = (left - 2.0 * c2[i] + right) * idx2
                n2[i] = c2[i] + dt * (
                    lap
                    + c2[i] * (1.0 - a21 * c1[i] - c2[i] - a23 * c3[i])
                )
        if act3:
            for i in range(n):
                left = c3[i - 1] if i > 0 else c3[1]
                right = c3[i + 1] if i < n - 1 else c3[n - 2]
                lap = (left - 2.0 * c3[i] + right) * idx2
                n3[i] = c3[i] + dt * (
                    d3 * lap
                    + r3 * c3[i] * (1.0 - a31 * c1[i] - a32 * c2[i] - c3[i])
                )
        if act1:
            tmp = c1; c1 = n1; n1 = tmp
        if act2:
            tmp = c2; c2 = n2; n2 = tmp
        if act3:
            tmp = c3; c3 = n3; n3 = tmp
    if steps % 2 == 1:
        # results of odd-length runs live in the scratch arrays
        if act1:
            for i in range(n):
                u1[i] = b1[i]
        if act2:
            for i in range(n):
                u2[i] = b2[i]
        if act3:
            for i in range(n):
                u3[i] = b3[i]
