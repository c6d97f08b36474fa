//! Synthetic decompiled-app trees.
//!
//! Each insecure idiom comes in four shapes: the canonical snippet, a copy
//! with obfuscated (renamed) identifiers, a smali translation, and a variant
//! whose methods or statements appear in a different order. Clean apps carry
//! correct verification code that must not be flagged.

use std::fs;
use std::io;
use std::path::Path;

/// Ad-library list used by the synthetic corpora.
pub const AD_LIST: &str = "\
# ads and analytics packages
com.google.ads
com.admob.android.ads
com.flurry
com.millennialmedia
com.inmobi
com.mopub
";

/// One file of an app tree.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile {
            path: path.into(),
            text: text.into(),
        }
    }
}

/// What a scan of an app is expected to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    /// One of `NoSsl`, `SrcOnly`, `AdsOnly`, `SrcAndAds`.
    pub ssl_class: &'static str,
    /// Idiom names, sorted, deduplicated.
    pub idioms: Vec<&'static str>,
}

#[derive(Debug, Clone)]
pub struct AppFixture {
    pub app_id: String,
    pub files: Vec<SourceFile>,
    pub expected: Expected,
}

impl AppFixture {
    pub fn write_into(&self, corpus: &Path) -> io::Result<()> {
        let root = corpus.join(&self.app_id);
        for file in &self.files {
            let path = root.join(&file.path);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, &file.text)?;
        }
        fs::create_dir_all(root)
    }
}

pub fn write_corpus(apps: &[AppFixture], corpus: &Path) -> io::Result<()> {
    for app in apps {
        app.write_into(corpus)?;
    }
    Ok(())
}

pub const TRUST_ALL: &str = "TrustAllTrustManager";
pub const ALLOW_ALL_CUSTOM: &str = "AllowAllHostnameVerifierCustom";
pub const ALLOW_ALL_BUILTIN: &str = "AllowAllHostnameVerifierBuiltin";
pub const IGNORE_SSL_ERROR: &str = "IgnoreSslErrorWebViewClient";

/// Empty `checkServerTrusted` body.
pub const SNIPPET_TRUST_ALL: &str = r#"TrustManager tm = new X509TrustManager(){

    public void checkServerTrusted(X509Certificate[] c, String
        at) throws CertificateException
        {} // <- Empty Code Block = No verification
};
"#;

/// Built-in allow-all hostname verifier.
pub const SNIPPET_ALLOW_ALL_BUILTIN: &str = r#"SSLSocketFactory s = new SSLSocketFactory(keyStore);
s.setHostnameVerifier(SSLSocketFactory.
    ALLOW_ALL_HOSTNAME_VERIFIER);
"#;

/// `verify` that always answers true.
pub const SNIPPET_ALLOW_ALL_CUSTOM: &str = r#"class AllowAll implements javax.net.ssl.HostnameVerifier{
    AllowAll() {
        this.<init>();
    }
    public boolean verify(String r1, SSLSession r2) {
        return true; //<- Always true = Allow All certificates
    }
};
"#;

/// `onReceivedSslError` that proceeds.
pub const SNIPPET_IGNORE_SSL_ERROR: &str = r#"class IgnoreError implements WebViewClient{

    public void onReceivedSslError(WebView w, SslErrorHandler
        h, SslError e) {
        h.proceed(); //<- Proceed even if error occurs
    }
};
"#;

fn java(package: &str, imports: &[&str], body: &str) -> String {
    let mut out = format!("package {package};\n\n");
    for import in imports {
        out.push_str(&format!("import {import};\n"));
    }
    out.push('\n');
    out.push_str(body);
    out
}

/// Wraps a statement-level snippet in a class so it reads like a
/// decompiled file.
fn in_method(package: &str, class: &str, imports: &[&str], snippet: &str) -> String {
    let indented: String = snippet
        .lines()
        .map(|l| if l.is_empty() { "\n".to_string() } else { format!("        {l}\n") })
        .collect();
    java(
        package,
        imports,
        &format!(
            "public class {class} {{\n    private static final String BASE = \"https://api.example.com/v1\";\n\n    void open(java.security.KeyStore keyStore) throws Exception {{\n{indented}    }}\n}}\n"
        ),
    )
}

const TLS_IMPORTS: &[&str] = &[
    "java.security.cert.CertificateException",
    "java.security.cert.X509Certificate",
    "javax.net.ssl.SSLSession",
    "javax.net.ssl.TrustManager",
    "javax.net.ssl.X509TrustManager",
];

// ---- trust-all trust manager ---------------------------------------------

fn trust_all_verbatim(pkg: &str) -> SourceFile {
    SourceFile::new(
        format!("{}/net/TrustAllFactory.java", pkg.replace('.', "/")),
        in_method(pkg, "TrustAllFactory", TLS_IMPORTS, SNIPPET_TRUST_ALL),
    )
}

fn trust_all_renamed(pkg: &str) -> SourceFile {
    let body = r#"public final class a implements X509TrustManager {
    public final void checkClientTrusted(X509Certificate[] x0, String x1) throws CertificateException {
        if (x0 == null) {
            throw new CertificateException("empty");
        }
    }

    public final void checkServerTrusted(X509Certificate[] x0, String x1) throws CertificateException {
    }

    public final X509Certificate[] getAcceptedIssuers() {
        return new X509Certificate[0];
    }
}
"#;
    SourceFile::new(format!("{}/a.java", pkg.replace('.', "/")), java(pkg, TLS_IMPORTS, body))
}

fn trust_all_smali(pkg: &str) -> SourceFile {
    let dir = pkg.replace('.', "/");
    let text = format!(
        r#".class public final L{dir}/b;
.super Ljava/lang/Object;
.source "SourceFile"

# interfaces
.implements Ljavax/net/ssl/X509TrustManager;


# direct methods
.method public constructor <init>()V
    .locals 0

    invoke-direct {{p0}}, Ljava/lang/Object;-><init>()V

    return-void
.end method


# virtual methods
.method public final checkClientTrusted([Ljava/security/cert/X509Certificate;Ljava/lang/String;)V
    .locals 2

    if-nez p1, :cond_0

    new-instance v0, Ljava/security/cert/CertificateException;

    const-string v1, "empty"

    invoke-direct {{v0, v1}}, Ljava/security/cert/CertificateException;-><init>(Ljava/lang/String;)V

    throw v0

    :cond_0
    return-void
.end method

.method public final checkServerTrusted([Ljava/security/cert/X509Certificate;Ljava/lang/String;)V
    .locals 0
    .annotation system Ldalvik/annotation/Throws;
        value = {{
            Ljava/security/cert/CertificateException;
        }}
    .end annotation

    .prologue
    .line 42
    return-void
.end method

.method public final getAcceptedIssuers()[Ljava/security/cert/X509Certificate;
    .locals 1

    const/4 v0, 0x0

    new-array v0, v0, [Ljava/security/cert/X509Certificate;

    return-object v0
.end method
"#
    );
    SourceFile::new(format!("{dir}/b.smali"), text)
}

fn trust_all_reordered(pkg: &str) -> SourceFile {
    let body = r#"public class PermissiveTrust implements X509TrustManager {
    public X509Certificate[] getAcceptedIssuers() {
        return null;
    }

    public void checkServerTrusted(X509Certificate[] chain, String authType) {
        return;
    }

    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        throw new CertificateException("client auth unsupported");
    }
}
"#;
    SourceFile::new(
        format!("{}/http/PermissiveTrust.java", pkg.replace('.', "/")),
        java(pkg, TLS_IMPORTS, body),
    )
}

// ---- built-in allow-all hostname verifier --------------------------------

const HTTP_IMPORTS: &[&str] = &[
    "java.security.KeyStore",
    "org.apache.http.conn.ssl.SSLSocketFactory",
];

fn builtin_verbatim(pkg: &str) -> SourceFile {
    SourceFile::new(
        format!("{}/net/SocketSetup.java", pkg.replace('.', "/")),
        in_method(pkg, "SocketSetup", HTTP_IMPORTS, SNIPPET_ALLOW_ALL_BUILTIN),
    )
}

fn builtin_renamed(pkg: &str) -> SourceFile {
    let snippet = r#"SSLSocketFactory c = new SSLSocketFactory(keyStore);
c.setHostnameVerifier(SSLSocketFactory.ALLOW_ALL_HOSTNAME_VERIFIER);
"#;
    SourceFile::new(
        format!("{}/c.java", pkg.replace('.', "/")),
        in_method(pkg, "c", HTTP_IMPORTS, snippet),
    )
}

fn builtin_smali(pkg: &str) -> SourceFile {
    let dir = pkg.replace('.', "/");
    let text = format!(
        r#".class public L{dir}/d;
.super Ljava/lang/Object;
.source "SourceFile"


# static fields
.field private static final a:Ljava/lang/String; = "https://api.example.com/v1"


# virtual methods
.method public final a(Ljava/security/KeyStore;)Lorg/apache/http/conn/ssl/SSLSocketFactory;
    .locals 2

    new-instance v0, Lorg/apache/http/conn/ssl/SSLSocketFactory;

    invoke-direct {{v0, p1}}, Lorg/apache/http/conn/ssl/SSLSocketFactory;-><init>(Ljava/security/KeyStore;)V

    sget-object v1, Lorg/apache/http/conn/ssl/SSLSocketFactory;->ALLOW_ALL_HOSTNAME_VERIFIER:Lorg/apache/http/conn/ssl/X509HostnameVerifier;

    invoke-virtual {{v0, v1}}, Lorg/apache/http/conn/ssl/SSLSocketFactory;->setHostnameVerifier(Lorg/apache/http/conn/ssl/X509HostnameVerifier;)V

    return-object v0
.end method
"#
    );
    SourceFile::new(format!("{dir}/d.smali"), text)
}

fn builtin_reordered(pkg: &str) -> SourceFile {
    let body = r#"public class Client {
    private SSLSocketFactory factory;

    void configure() {
        factory.setHostnameVerifier(SSLSocketFactory.ALLOW_ALL_HOSTNAME_VERIFIER);
    }

    void init(KeyStore keyStore) throws Exception {
        factory = new SSLSocketFactory(keyStore);
        configure();
    }
}
"#;
    SourceFile::new(
        format!("{}/http/Client.java", pkg.replace('.', "/")),
        java(pkg, HTTP_IMPORTS, body),
    )
}

// ---- custom allow-all hostname verifier ----------------------------------

const VERIFIER_IMPORTS: &[&str] = &["javax.net.ssl.HostnameVerifier", "javax.net.ssl.SSLSession"];

fn custom_verbatim(pkg: &str) -> SourceFile {
    SourceFile::new(
        format!("{}/net/AllowAll.java", pkg.replace('.', "/")),
        java(pkg, VERIFIER_IMPORTS, SNIPPET_ALLOW_ALL_CUSTOM),
    )
}

fn custom_renamed(pkg: &str) -> SourceFile {
    let body = r#"final class e implements javax.net.ssl.HostnameVerifier {
    e() {
        super();
    }

    public final boolean verify(String a, SSLSession b) {
        return true;
    }
}
"#;
    SourceFile::new(format!("{}/e.java", pkg.replace('.', "/")), java(pkg, VERIFIER_IMPORTS, body))
}

fn custom_smali(pkg: &str) -> SourceFile {
    let dir = pkg.replace('.', "/");
    let text = format!(
        r#".class final L{dir}/f;
.super Ljava/lang/Object;
.source "SourceFile"

# interfaces
.implements Ljavax/net/ssl/HostnameVerifier;


# direct methods
.method constructor <init>()V
    .locals 0

    invoke-direct {{p0}}, Ljava/lang/Object;-><init>()V

    return-void
.end method


# virtual methods
.method public final verify(Ljava/lang/String;Ljavax/net/ssl/SSLSession;)Z
    .locals 1

    .prologue
    .line 17
    const/4 v0, 0x1

    return v0
.end method
"#
    );
    SourceFile::new(format!("{dir}/f.smali"), text)
}

fn custom_reordered(pkg: &str) -> SourceFile {
    let body = r#"public class HostCheck implements HostnameVerifier {
    public boolean verify(String host, SSLSession session) {
        return true;
    }

    public String toString() {
        return "HostCheck";
    }

    public HostCheck() {
    }
}
"#;
    SourceFile::new(
        format!("{}/http/HostCheck.java", pkg.replace('.', "/")),
        java(pkg, VERIFIER_IMPORTS, body),
    )
}

// ---- WebView client ignoring SSL errors ----------------------------------

const WEBVIEW_IMPORTS: &[&str] = &[
    "android.net.http.SslError",
    "android.webkit.SslErrorHandler",
    "android.webkit.WebView",
    "android.webkit.WebViewClient",
];

fn ignore_verbatim(pkg: &str) -> SourceFile {
    let text = format!(
        "{}\nclass Pages {{\n    static final String HOME = \"https://m.example.com/\";\n}}\n",
        java(pkg, WEBVIEW_IMPORTS, SNIPPET_IGNORE_SSL_ERROR)
    );
    SourceFile::new(format!("{}/web/IgnoreError.java", pkg.replace('.', "/")), text)
}

fn ignore_renamed(pkg: &str) -> SourceFile {
    let body = r#"final class g extends WebViewClient {
    public final void onReceivedSslError(WebView a, SslErrorHandler b, SslError c) {
        b.proceed();
    }
}
"#;
    SourceFile::new(format!("{}/g.java", pkg.replace('.', "/")), java(pkg, WEBVIEW_IMPORTS, body))
}

fn ignore_smali(pkg: &str) -> SourceFile {
    let dir = pkg.replace('.', "/");
    let text = format!(
        r#".class final L{dir}/h;
.super Landroid/webkit/WebViewClient;
.source "SourceFile"


# virtual methods
.method public final onPageFinished(Landroid/webkit/WebView;Ljava/lang/String;)V
    .locals 0

    return-void
.end method

.method public final onReceivedSslError(Landroid/webkit/WebView;Landroid/webkit/SslErrorHandler;Landroid/net/http/SslError;)V
    .locals 0

    invoke-virtual {{p2}}, Landroid/webkit/SslErrorHandler;->proceed()V

    return-void
.end method
"#
    );
    SourceFile::new(format!("{dir}/h.smali"), text)
}

fn ignore_reordered(pkg: &str) -> SourceFile {
    let body = r#"public class Browser extends WebViewClient {
    public void onReceivedSslError(WebView view, SslErrorHandler handler, SslError error) {
        android.util.Log.w("Browser", "ssl error " + error);
        handler.proceed();
    }

    public void onPageFinished(WebView view, String url) {
        view.loadUrl("javascript:init()");
    }

    public boolean shouldOverrideUrlLoading(WebView view, String url) {
        return false;
    }
}
"#;
    SourceFile::new(
        format!("{}/web/Browser.java", pkg.replace('.', "/")),
        java(pkg, WEBVIEW_IMPORTS, body),
    )
}

// ---- clean code ------------------------------------------------------------

fn clean_trust_manager(pkg: &str) -> SourceFile {
    let body = r#"public class PinnedTrust implements X509TrustManager {
    private final X509TrustManager system;

    public PinnedTrust(X509TrustManager system) {
        this.system = system;
    }

    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        system.checkClientTrusted(chain, authType);
    }

    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
        // delegate to the platform store
        system.checkServerTrusted(chain, authType);
    }

    public X509Certificate[] getAcceptedIssuers() {
        return system.getAcceptedIssuers();
    }
}
"#;
    SourceFile::new(
        format!("{}/net/PinnedTrust.java", pkg.replace('.', "/")),
        java(pkg, TLS_IMPORTS, body),
    )
}

fn clean_verifier(pkg: &str) -> SourceFile {
    let body = r#"public class ApiHostVerifier implements HostnameVerifier {
    private static final String HOST = "api.example.com";

    public boolean verify(String hostname, SSLSession session) {
        if (!HOST.equals(hostname)) {
            return false;
        }
        return javax.net.ssl.HttpsURLConnection.getDefaultHostnameVerifier().verify(hostname, session);
    }
}
"#;
    SourceFile::new(
        format!("{}/net/ApiHostVerifier.java", pkg.replace('.', "/")),
        java(pkg, VERIFIER_IMPORTS, body),
    )
}

fn clean_verifier_smali(pkg: &str) -> SourceFile {
    let dir = pkg.replace('.', "/");
    let text = format!(
        r#".class public final L{dir}/k;
.super Ljava/lang/Object;

# interfaces
.implements Ljavax/net/ssl/HostnameVerifier;


# virtual methods
.method public final verify(Ljava/lang/String;Ljavax/net/ssl/SSLSession;)Z
    .locals 1

    const-string v0, "api.example.com"

    invoke-virtual {{v0, p1}}, Ljava/lang/String;->equals(Ljava/lang/Object;)Z

    move-result v0

    return v0
.end method
"#
    );
    SourceFile::new(format!("{dir}/k.smali"), text)
}

fn clean_webview(pkg: &str) -> SourceFile {
    let body = r#"public class SafeClient extends WebViewClient {
    public void onReceivedSslError(WebView view, SslErrorHandler handler, SslError error) {
        // never proceed on certificate errors
        handler.cancel();
    }
}
"#;
    SourceFile::new(
        format!("{}/web/SafeClient.java", pkg.replace('.', "/")),
        java(pkg, WEBVIEW_IMPORTS, body),
    )
}

fn clean_https_client(pkg: &str) -> SourceFile {
    let body = r#"public class Api {
    private static final String ENDPOINT = "https://api.example.com/v2/items";

    public java.io.InputStream fetch() throws java.io.IOException {
        HttpsURLConnection conn = (HttpsURLConnection) new java.net.URL(ENDPOINT).openConnection();
        conn.setConnectTimeout(10000);
        return conn.getInputStream();
    }
}
"#;
    SourceFile::new(
        format!("{}/net/Api.java", pkg.replace('.', "/")),
        java(pkg, &["javax.net.ssl.HttpsURLConnection"], body),
    )
}

fn plain_activity(pkg: &str) -> SourceFile {
    let body = r#"public class MainActivity extends android.app.Activity {
    protected void onCreate(android.os.Bundle state) {
        super.onCreate(state);
        setTitle("Classic SSLeay-free notes");
    }
}
"#;
    SourceFile::new(format!("{}/MainActivity.java", pkg.replace('.', "/")), java(pkg, &[], body))
}

fn ad_sdk_https() -> SourceFile {
    SourceFile::new(
        "com/google/ads/AdRequest.java",
        java(
            "com.google.ads",
            &[],
            "public class AdRequest {\n    static final String SERVE = \"https://googleads.g.doubleclick.net/mads/gma\";\n}\n",
        ),
    )
}

fn ad_sdk_trust_all() -> SourceFile {
    let body = r#"public class MMTrust implements X509TrustManager {
    public void checkClientTrusted(X509Certificate[] c, String a) {}
    public void checkServerTrusted(X509Certificate[] c, String a) {}
    public X509Certificate[] getAcceptedIssuers() { return null; }
}
"#;
    SourceFile::new(
        "com/millennialmedia/android/MMTrust.java",
        java("com.millennialmedia.android", TLS_IMPORTS, body),
    )
}

fn app(app_id: &str, files: Vec<SourceFile>, ssl_class: &'static str, idioms: &[&'static str]) -> AppFixture {
    let mut idioms = idioms.to_vec();
    idioms.sort_unstable();
    idioms.dedup();
    AppFixture {
        app_id: app_id.to_string(),
        files,
        expected: Expected { ssl_class, idioms },
    }
}

/// Twelve apps: eight seeded with every idiom in all four shapes (two per
/// app), four clean.
pub fn idiom_corpus() -> Vec<AppFixture> {
    vec![
        app(
            "app01",
            vec![trust_all_verbatim("com.example.app01"), builtin_verbatim("com.example.app01")],
            "SrcOnly",
            &[TRUST_ALL, ALLOW_ALL_BUILTIN],
        ),
        app(
            "app02",
            vec![custom_verbatim("com.example.app02"), ignore_verbatim("com.example.app02"), ad_sdk_https()],
            "SrcAndAds",
            &[ALLOW_ALL_CUSTOM, IGNORE_SSL_ERROR],
        ),
        app(
            "app03",
            vec![trust_all_renamed("com.example.app03"), custom_renamed("com.example.app03")],
            "SrcOnly",
            &[TRUST_ALL, ALLOW_ALL_CUSTOM],
        ),
        app(
            "app04",
            vec![builtin_renamed("com.example.app04"), ignore_renamed("com.example.app04"), ad_sdk_https()],
            "SrcAndAds",
            &[ALLOW_ALL_BUILTIN, IGNORE_SSL_ERROR],
        ),
        app(
            "app05",
            vec![trust_all_smali("com.example.app05"), builtin_smali("com.example.app05")],
            "SrcOnly",
            &[TRUST_ALL, ALLOW_ALL_BUILTIN],
        ),
        app(
            "app06",
            vec![custom_smali("com.example.app06"), ignore_smali("com.example.app06"), ad_sdk_trust_all()],
            "SrcAndAds",
            &[ALLOW_ALL_CUSTOM, IGNORE_SSL_ERROR],
        ),
        app(
            "app07",
            vec![trust_all_reordered("com.example.app07"), custom_reordered("com.example.app07")],
            "SrcOnly",
            &[TRUST_ALL, ALLOW_ALL_CUSTOM],
        ),
        app(
            "app08",
            vec![builtin_reordered("com.example.app08"), ignore_reordered("com.example.app08")],
            "SrcOnly",
            &[ALLOW_ALL_BUILTIN, IGNORE_SSL_ERROR],
        ),
        app(
            "app09",
            vec![clean_trust_manager("com.example.app09"), clean_https_client("com.example.app09")],
            "SrcOnly",
            &[],
        ),
        app(
            "app10",
            vec![
                clean_verifier("com.example.app10"),
                clean_verifier_smali("com.example.app10"),
                ad_sdk_https(),
            ],
            "SrcAndAds",
            &[],
        ),
        app(
            "app11",
            vec![clean_webview("com.example.app11"), clean_https_client("com.example.app11")],
            "SrcOnly",
            &[],
        ),
        app(
            "app12",
            vec![plain_activity("com.example.app12"), ad_sdk_https(), ad_sdk_trust_all()],
            "AdsOnly",
            &[],
        ),
    ]
}

/// Bypass bucket of an app in the taxonomy corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucket {
    AcOnly,
    AhOnly,
    Both,
    None,
    AdsOnly,
    NoSsl,
}

/// Twenty apps with a known bypass mix: 8 trust-any-certificate only,
/// 1 allow-any-hostname only, 3 both, 5 correct, 2 ads-only, 1 without SSL.
pub fn taxonomy_corpus() -> Vec<(AppFixture, Bucket)> {
    let mut plan = Vec::new();
    plan.extend(std::iter::repeat_n(Bucket::AcOnly, 8));
    plan.push(Bucket::AhOnly);
    plan.extend(std::iter::repeat_n(Bucket::Both, 3));
    plan.extend(std::iter::repeat_n(Bucket::None, 5));
    plan.extend(std::iter::repeat_n(Bucket::AdsOnly, 2));
    plan.push(Bucket::NoSsl);

    plan.into_iter()
        .enumerate()
        .map(|(i, bucket)| {
            let id = format!("tx{:02}", i + 1);
            let pkg = format!("com.example.{id}");
            // Rotate through the idiom shapes so every form gets exercised.
            let (files, class, idioms): (Vec<SourceFile>, &'static str, Vec<&'static str>) = match bucket {
                Bucket::AcOnly => {
                    let tm = match i % 4 {
                        0 => trust_all_verbatim(&pkg),
                        1 => trust_all_renamed(&pkg),
                        2 => trust_all_smali(&pkg),
                        _ => trust_all_reordered(&pkg),
                    };
                    let mut files = vec![tm, clean_https_client(&pkg)];
                    if i % 2 == 0 {
                        files.push(ad_sdk_https());
                        (files, "SrcAndAds", vec![TRUST_ALL])
                    } else {
                        (files, "SrcOnly", vec![TRUST_ALL])
                    }
                }
                Bucket::AhOnly => (
                    vec![custom_smali(&pkg), clean_https_client(&pkg)],
                    "SrcOnly",
                    vec![ALLOW_ALL_CUSTOM],
                ),
                Bucket::Both => {
                    let hv = if i % 2 == 0 { builtin_verbatim(&pkg) } else { custom_renamed(&pkg) };
                    let idiom = if i % 2 == 0 { ALLOW_ALL_BUILTIN } else { ALLOW_ALL_CUSTOM };
                    (vec![trust_all_renamed(&pkg), hv], "SrcOnly", vec![TRUST_ALL, idiom])
                }
                Bucket::None => {
                    let mut files = vec![clean_trust_manager(&pkg), clean_https_client(&pkg)];
                    if i % 2 == 1 {
                        files.push(clean_webview(&pkg));
                        files.push(ad_sdk_https());
                        (files, "SrcAndAds", vec![])
                    } else {
                        (files, "SrcOnly", vec![])
                    }
                }
                Bucket::AdsOnly => (
                    vec![plain_activity(&pkg), ad_sdk_https()],
                    "AdsOnly",
                    vec![],
                ),
                Bucket::NoSsl => (vec![plain_activity(&pkg)], "NoSsl", vec![]),
            };
            (app(&id, files, class, &idioms), bucket)
        })
        .collect()
}
