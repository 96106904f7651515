// Bilingual (Spanish/English) interface strings. Spanish is the default,
// matching the community the repository serves.

export type Lang = "es" | "en";

const STRINGS = {
  es: {
    appTitle: "Mi LAGOVirtual",
    browse: "Explorar",
    search: "Buscar",
    stats: "Estadísticas",
    communities: "Comunidades",
    collections: "Colecciones",
    items: "Ítems",
    depositHere: "Enviar un item en esta colección",
    recommend: "recomendar este artículo",
    subscribe: "Suscribirse a esta colección",
    unsubscribe: "Cancelar la suscripción",
    withdraw: "Retirar este ítem",
    files: "Archivos",
    metadata: "Metadatos",
    download: "Descargar",
    submit: "Enviar",
    token: "Credencial de miembro",
    loginNeeded: "Se requiere una credencial de miembro para depositar.",
    visits: "Visitas",
    downloads: "Descargas",
    topDownloaded: "Más descargados",
    topViewed: "Más vistos",
    rssFeed: "Canal RSS",
    empty: "No hay resultados.",
  },
  en: {
    appTitle: "Mi LAGOVirtual",
    browse: "Browse",
    search: "Search",
    stats: "Statistics",
    communities: "Communities",
    collections: "Collections",
    items: "Items",
    depositHere: "Submit an item to this collection",
    recommend: "recommend this item",
    subscribe: "Subscribe to this collection",
    unsubscribe: "Unsubscribe",
    withdraw: "Withdraw this item",
    files: "Files",
    metadata: "Metadata",
    download: "Download",
    submit: "Submit",
    token: "Member token",
    loginNeeded: "A member token is required to deposit.",
    visits: "Visits",
    downloads: "Downloads",
    topDownloaded: "Top downloaded",
    topViewed: "Top viewed",
    rssFeed: "RSS feed",
    empty: "No results.",
  },
} as const;

export type StringKey = keyof (typeof STRINGS)["es"];

let current: Lang = "es";

export function setLang(lang: Lang): void {
  current = lang;
}

export function getLang(): Lang {
  return current;
}

export function t(key: StringKey): string {
  return STRINGS[current][key];
}
