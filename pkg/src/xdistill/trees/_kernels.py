"""Compiled tree-growing and traversal kernels.

All trees share one flat-array layout: ``feature[i] < 0`` marks a leaf,
internal nodes route rows with ``x[feature] < threshold`` to ``left``.
Randomness comes from an explicit splitmix64 stream seeded per tree, so
results are bit-identical regardless of thread count.
"""
from __future__ import annotations

import numpy as np
from numba import njit

GINI = 0
VARIANCE = 1
NEWTON = 2

LEAF = -1
_EPS_GAIN = 1e-12

_U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_U64_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _U64_GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _U64_MIX1
    z = (z ^ (z >> np.uint64(27))) * _U64_MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _rand_uniform(state):
    return float(_next_u64(state) >> np.uint64(11)) * _INV_2_53


@njit(cache=True, nogil=True, inline="always")
def _rand_below(state, n):
    return int(_next_u64(state) % np.uint64(n))


@njit(cache=True, nogil=True)
def _sample_features(state, feat_buf, mtry):
    """Draw mtry distinct features (partial Fisher-Yates), sorted ascending."""
    p = feat_buf.shape[0]
    for j in range(p):
        feat_buf[j] = j
    for j in range(mtry):
        r = j + _rand_below(state, p - j)
        tmp = feat_buf[j]
        feat_buf[j] = feat_buf[r]
        feat_buf[r] = tmp
    for j in range(1, mtry):
        key = feat_buf[j]
        i = j - 1
        while i >= 0 and feat_buf[i] > key:
            feat_buf[i + 1] = feat_buf[i]
            i -= 1
        feat_buf[i + 1] = key


@njit(cache=True, nogil=True)
def grow_tree(
    x,
    y_class,
    targets,
    hess,
    sample_weight,
    rows,
    n_classes,
    criterion,
    mtry,
    max_depth,
    min_leaf,
    extra,
    l2,
    seed,
):
    """Grow one tree depth-first; returns flat node arrays and importances.

    ``rows`` lists the training row ids (bootstrap repeats allowed).
    ``criterion``: GINI uses y_class, VARIANCE uses targets, NEWTON uses
    targets as gradients and hess as hessians.
    """
    m = rows.shape[0]
    p = x.shape[1]
    n_values = n_classes if criterion == GINI else 1
    cap = 2 * m + 1

    feature = np.full(cap, LEAF, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, LEAF, dtype=np.int32)
    right = np.full(cap, LEAF, dtype=np.int32)
    value = np.zeros((cap, n_values), dtype=np.float64)
    n_node = np.zeros(cap, dtype=np.int64)
    weighted = np.zeros(cap, dtype=np.float64)
    impurity = np.zeros(cap, dtype=np.float64)
    importances = np.zeros(p, dtype=np.float64)

    idx = rows.copy()
    tmp = np.empty(m, dtype=np.int64)
    feat_buf = np.empty(p, dtype=np.int64)
    cls_w = np.empty(max(n_classes, 1), dtype=np.float64)
    cls_left = np.empty(max(n_classes, 1), dtype=np.float64)

    state = np.empty(1, dtype=np.uint64)
    state[0] = seed

    # explicit DFS stack: node id, start, end, depth
    stack = np.empty((cap, 4), dtype=np.int64)
    node_count = 1
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    stack[0, 3] = 0
    top = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        count = end - start

        # node statistics
        w_total = 0.0
        s = 0.0
        ss = 0.0
        g_sum = 0.0
        h_sum = 0.0
        if criterion == GINI:
            for k in range(n_classes):
                cls_w[k] = 0.0
            for i in range(start, end):
                r = idx[i]
                w = sample_weight[r]
                w_total += w
                cls_w[y_class[r]] += w
            sq = 0.0
            for k in range(n_classes):
                frac = cls_w[k] / w_total
                sq += frac * frac
                value[node, k] = frac
            node_imp = 1.0 - sq
            parent_metric = w_total * node_imp
        elif criterion == VARIANCE:
            for i in range(start, end):
                r = idx[i]
                w = sample_weight[r]
                t = targets[r]
                w_total += w
                s += w * t
                ss += w * t * t
            mean = s / w_total
            metric = ss - s * mean
            if metric < 0.0:
                metric = 0.0
            node_imp = metric / w_total
            value[node, 0] = mean
            parent_metric = metric
        else:  # NEWTON
            for i in range(start, end):
                r = idx[i]
                w_total += sample_weight[r]
                g_sum += targets[r]
                h_sum += hess[r]
            value[node, 0] = -g_sum / (h_sum + l2)
            parent_metric = -(g_sum * g_sum) / (h_sum + l2)
            node_imp = -parent_metric / w_total

        n_node[node] = count
        weighted[node] = w_total
        impurity[node] = node_imp

        if (max_depth > 0 and depth >= max_depth) or count < 2 * min_leaf or count < 2:
            continue
        if criterion != NEWTON and parent_metric <= _EPS_GAIN:
            continue

        n_cand = mtry if mtry < p else p
        _sample_features(state, feat_buf, n_cand)

        best_gain = _EPS_GAIN
        best_feat = -1
        best_thr = 0.0

        for ci in range(n_cand):
            f = feat_buf[ci]
            if extra == 1:
                lo = x[idx[start], f]
                hi = lo
                for i in range(start + 1, end):
                    v = x[idx[i], f]
                    if v < lo:
                        lo = v
                    elif v > hi:
                        hi = v
                if hi <= lo:
                    continue
                # threshold uniform on (lo, hi]; rows with x < thr go left
                thr = hi - _rand_uniform(state) * (hi - lo)
                if thr <= lo:
                    thr = hi
                nl = 0
                if criterion == GINI:
                    wl = 0.0
                    for k in range(n_classes):
                        cls_left[k] = 0.0
                    for i in range(start, end):
                        r = idx[i]
                        if x[r, f] < thr:
                            nl += 1
                            w = sample_weight[r]
                            wl += w
                            cls_left[y_class[r]] += w
                    if nl < min_leaf or count - nl < min_leaf:
                        continue
                    sql = 0.0
                    sqr = 0.0
                    wr = w_total - wl
                    for k in range(n_classes):
                        cl = cls_left[k]
                        cr = cls_w[k] - cl
                        sql += cl * cl
                        sqr += cr * cr
                    gain = parent_metric - (wl - sql / wl) - (wr - sqr / wr)
                elif criterion == VARIANCE:
                    wl = 0.0
                    sl = 0.0
                    ssl = 0.0
                    sr = 0.0
                    ssr = 0.0
                    for i in range(start, end):
                        r = idx[i]
                        t = targets[r]
                        w = sample_weight[r]
                        if x[r, f] < thr:
                            nl += 1
                            wl += w
                            sl += w * t
                            ssl += w * t * t
                    if nl < min_leaf or count - nl < min_leaf:
                        continue
                    wr = w_total - wl
                    sr = s - sl
                    ssr = ss - ssl
                    ml = ssl - sl * sl / wl
                    mr = ssr - sr * sr / wr
                    gain = parent_metric - ml - mr
                else:
                    gl = 0.0
                    hl = 0.0
                    for i in range(start, end):
                        r = idx[i]
                        if x[r, f] < thr:
                            nl += 1
                            gl += targets[r]
                            hl += hess[r]
                    if nl < min_leaf or count - nl < min_leaf:
                        continue
                    gr = g_sum - gl
                    hr = h_sum - hl
                    gain = (
                        gl * gl / (hl + l2)
                        + gr * gr / (hr + l2)
                        + parent_metric
                    )
                if gain > best_gain:
                    best_gain = gain
                    best_feat = f
                    best_thr = thr
            else:
                # exact best split: sort node rows by feature value
                nloc = count
                vals = np.empty(nloc, dtype=np.float64)
                for i in range(nloc):
                    vals[i] = x[idx[start + i], f]
                order = np.argsort(vals)
                if vals[order[0]] >= vals[order[nloc - 1]]:
                    continue
                if criterion == GINI:
                    for k in range(n_classes):
                        cls_left[k] = 0.0
                    wl = 0.0
                    sql = 0.0
                    for i in range(nloc - 1):
                        r = idx[start + order[i]]
                        w = sample_weight[r]
                        k = y_class[r]
                        # incremental sum of squared class weights
                        sql += w * (2.0 * cls_left[k] + w)
                        cls_left[k] += w
                        wl += w
                        vi = vals[order[i]]
                        vj = vals[order[i + 1]]
                        if vj <= vi:
                            continue
                        if i + 1 < min_leaf or nloc - i - 1 < min_leaf:
                            continue
                        wr = w_total - wl
                        sqr = sq_total_from(cls_w, cls_left, n_classes)
                        gain = parent_metric - (wl - sql / wl) - (wr - sqr / wr)
                        if gain > best_gain:
                            best_gain = gain
                            best_feat = f
                            thr = 0.5 * (vi + vj)
                            if thr <= vi:
                                thr = vj
                            best_thr = thr
                elif criterion == VARIANCE:
                    wl = 0.0
                    sl = 0.0
                    ssl = 0.0
                    for i in range(nloc - 1):
                        r = idx[start + order[i]]
                        w = sample_weight[r]
                        t = targets[r]
                        wl += w
                        sl += w * t
                        ssl += w * t * t
                        vi = vals[order[i]]
                        vj = vals[order[i + 1]]
                        if vj <= vi:
                            continue
                        if i + 1 < min_leaf or nloc - i - 1 < min_leaf:
                            continue
                        wr = w_total - wl
                        sr = s - sl
                        ssr = ss - ssl
                        ml = ssl - sl * sl / wl
                        mr = ssr - sr * sr / wr
                        gain = parent_metric - ml - mr
                        if gain > best_gain:
                            best_gain = gain
                            best_feat = f
                            thr = 0.5 * (vi + vj)
                            if thr <= vi:
                                thr = vj
                            best_thr = thr
                else:
                    gl = 0.0
                    hl = 0.0
                    for i in range(nloc - 1):
                        r = idx[start + order[i]]
                        gl += targets[r]
                        hl += hess[r]
                        vi = vals[order[i]]
                        vj = vals[order[i + 1]]
                        if vj <= vi:
                            continue
                        if i + 1 < min_leaf or nloc - i - 1 < min_leaf:
                            continue
                        gr = g_sum - gl
                        hr = h_sum - hl
                        gain = (
                            gl * gl / (hl + l2)
                            + gr * gr / (hr + l2)
                            + parent_metric
                        )
                        if gain > best_gain:
                            best_gain = gain
                            best_feat = f
                            thr = 0.5 * (vi + vj)
                            if thr <= vi:
                                thr = vj
                            best_thr = thr

        if best_feat < 0:
            continue

        # stable partition: x < thr to the left
        nl = 0
        nr = 0
        for i in range(start, end):
            r = idx[i]
            if x[r, best_feat] < best_thr:
                idx[start + nl] = r
                nl += 1
            else:
                tmp[nr] = r
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = tmp[i]

        left_id = node_count
        right_id = node_count + 1
        node_count += 2
        feature[node] = best_feat
        threshold[node] = best_thr
        left[node] = left_id
        right[node] = right_id
        importances[best_feat] += best_gain

        stack[top, 0] = right_id
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = left_id
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1

    return (
        feature[:node_count].copy(),
        threshold[:node_count].copy(),
        left[:node_count].copy(),
        right[:node_count].copy(),
        value[:node_count].copy(),
        n_node[:node_count].copy(),
        weighted[:node_count].copy(),
        impurity[:node_count].copy(),
        importances,
    )


@njit(cache=True, nogil=True, inline="always")
def sq_total_from(cls_w, cls_left, n_classes):
    sqr = 0.0
    for k in range(n_classes):
        cr = cls_w[k] - cls_left[k]
        sqr += cr * cr
    return sqr


@njit(cache=True, nogil=True)
def bootstrap_rows(n, seed):
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    rows = np.empty(n, dtype=np.int64)
    for i in range(n):
        rows[i] = _rand_below(state, n)
    return rows


@njit(cache=True, nogil=True)
def apply_tree(feature, threshold, left, right, x):
    n = x.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if x[i, feature[node]] < threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


@njit(cache=True, nogil=True)
def grow_tree_hist(
    binned,
    n_bins,
    g,
    h,
    rows,
    max_leaves,
    min_leaf,
    l2,
):
    """Leaf-wise (best-gain-first) growth on pre-binned features.

    Internal nodes route rows with ``bin <= split_bin`` to the left; the
    caller converts split bins to raw-space thresholds.
    """
    m = rows.shape[0]
    p = binned.shape[1]
    max_bins = 0
    for j in range(p):
        if n_bins[j] > max_bins:
            max_bins = n_bins[j]
    cap = 2 * max_leaves + 1

    feature = np.full(cap, LEAF, dtype=np.int32)
    split_bin = np.full(cap, -1, dtype=np.int32)
    left = np.full(cap, LEAF, dtype=np.int32)
    right = np.full(cap, LEAF, dtype=np.int32)
    value = np.zeros(cap, dtype=np.float64)
    n_node = np.zeros(cap, dtype=np.int64)
    importances = np.zeros(p, dtype=np.float64)

    node_start = np.zeros(cap, dtype=np.int64)
    node_end = np.zeros(cap, dtype=np.int64)
    node_gain = np.full(cap, -1.0, dtype=np.float64)
    node_feat = np.full(cap, -1, dtype=np.int64)
    node_bin = np.full(cap, -1, dtype=np.int64)
    is_open = np.zeros(cap, dtype=np.uint8)

    idx = rows.copy()
    tmp = np.empty(m, dtype=np.int64)
    hist_g = np.empty((p, max_bins), dtype=np.float64)
    hist_h = np.empty((p, max_bins), dtype=np.float64)
    hist_c = np.empty((p, max_bins), dtype=np.int64)

    def _eval_node(node):
        start = node_start[node]
        end = node_end[node]
        count = end - start
        g_sum = 0.0
        h_sum = 0.0
        for jj in range(p):
            for bb in range(n_bins[jj]):
                hist_g[jj, bb] = 0.0
                hist_h[jj, bb] = 0.0
                hist_c[jj, bb] = 0
        for ii in range(start, end):
            rr = idx[ii]
            gv = g[rr]
            hv = h[rr]
            g_sum += gv
            h_sum += hv
            for jj in range(p):
                bb = binned[rr, jj]
                hist_g[jj, bb] += gv
                hist_h[jj, bb] += hv
                hist_c[jj, bb] += 1
        value[node] = -g_sum / (h_sum + l2)
        n_node[node] = count
        parent_score = g_sum * g_sum / (h_sum + l2)
        best_gain = _EPS_GAIN
        best_f = -1
        best_b = -1
        if count >= 2 * min_leaf and count >= 2:
            for jj in range(p):
                gl = 0.0
                hl = 0.0
                cl = 0
                for bb in range(n_bins[jj] - 1):
                    gl += hist_g[jj, bb]
                    hl += hist_h[jj, bb]
                    cl += hist_c[jj, bb]
                    if cl < min_leaf:
                        continue
                    if count - cl < min_leaf:
                        break
                    if cl == 0 or cl == count:
                        continue
                    gr = g_sum - gl
                    hr = h_sum - hl
                    gain = (
                        gl * gl / (hl + l2)
                        + gr * gr / (hr + l2)
                        - parent_score
                    )
                    if gain > best_gain:
                        best_gain = gain
                        best_f = jj
                        best_b = bb
        node_gain[node] = best_gain if best_f >= 0 else -1.0
        node_feat[node] = best_f
        node_bin[node] = best_b

    node_start[0] = 0
    node_end[0] = m
    node_count = 1
    _eval_node(0)
    is_open[0] = 1
    n_leaves = 1

    while n_leaves < max_leaves:
        best_node = -1
        best_gain = 0.0
        for nd in range(node_count):
            if is_open[nd] == 1 and node_gain[nd] > best_gain:
                best_gain = node_gain[nd]
                best_node = nd
        if best_node < 0:
            break
        f = node_feat[best_node]
        b = node_bin[best_node]
        start = node_start[best_node]
        end = node_end[best_node]
        nl = 0
        nr = 0
        for i in range(start, end):
            r = idx[i]
            if binned[r, f] <= b:
                idx[start + nl] = r
                nl += 1
            else:
                tmp[nr] = r
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = tmp[i]

        left_id = node_count
        right_id = node_count + 1
        node_count += 2
        feature[best_node] = f
        split_bin[best_node] = b
        left[best_node] = left_id
        right[best_node] = right_id
        importances[f] += node_gain[best_node]
        is_open[best_node] = 0

        node_start[left_id] = start
        node_end[left_id] = start + nl
        _eval_node(left_id)
        is_open[left_id] = 1
        node_start[right_id] = start + nl
        node_end[right_id] = end
        _eval_node(right_id)
        is_open[right_id] = 1
        n_leaves += 1

    return (
        feature[:node_count].copy(),
        split_bin[:node_count].copy(),
        left[:node_count].copy(),
        right[:node_count].copy(),
        value[:node_count].copy(),
        n_node[:node_count].copy(),
        importances,
    )
